#pragma once

#include "padfeec/linalg.hpp"
#include "padfeec/polyform.hpp"

#include <functional>
#include <string>
#include <vector>

namespace padfeec {

enum class LocalTag { P1minus, P1starminus, P0, Mixed, RT, RTperp, P1, CR, P2, P1vec, P2plus, P1plus };
enum class Variant { primal, dual };
enum class DiffOp { d, delta };

std::string tag_name(LocalTag t);

struct LocalSpace {
    CellGeometry cell;
    int k = 0;
    LocalTag tag = LocalTag::P1minus;
    std::vector<PolyForm> basis;
    int dim() const { return static_cast<int>(basis.size()); }
};

using FormOp = std::function<PolyForm(const PolyForm&)>;
PolyForm apply_op(DiffOp op, const PolyForm& w);

Mat form_gram(const std::vector<PolyForm>& a, const std::vector<PolyForm>& b, const CellGeometry& cell);
// Gram-Schmidt (two passes) on exact inner products; near-dependent forms dropped.
std::vector<PolyForm> orthonormal_forms(const std::vector<PolyForm>& forms, const CellGeometry& cell,
                                        double drop_tol = 1e-9);
// L2 projection coefficients onto target; residual = max relative L2 defect.
Mat coordinates_in(const LocalSpace& target, const std::vector<PolyForm>& forms, double* residual = nullptr);

// P1-minus (primal) or its star-conjugate (dual); orthonormal, P0 block first.
LocalSpace whitney_local(const CellGeometry& cell, int k, Variant v);
LocalSpace p0_local(const CellGeometry& cell, int k);
// P0 + kappa P0(k+1) + star kappa star P0(k-1).
LocalSpace mixed_local(const CellGeometry& cell, int k);
// Standard Whitney form of the sub-simplex given by local vertex positions.
PolyForm whitney_form(const CellGeometry& cell, const std::vector<int>& local_vertices);

struct RangeKernel {
    Subspace range;   // coordinates in the target space
    Subspace kernel;  // coordinates in the source space
    double residual = 0.0;
};
RangeKernel local_range_kernel(const LocalSpace& space, DiffOp op, const LocalSpace& target);
RangeKernel local_range_kernel(const LocalSpace& space, DiffOp op);

// Coordinates of a primal/dual pair in orthonormal ambient bases of
// X = span(P + T*Q) and Y = span(Q + TP). Used locally and globally.
struct PairData {
    Mat ax;   // primal basis in X coordinates
    Mat ay;   // dual basis in Y coordinates
    Mat t;    // T(primal basis) in Y coordinates
    Mat ts;   // T*(dual basis) in X coordinates
    bool ax_identity = false;
    bool ay_identity = false;

    int dim_p() const { return static_cast<int>(t.cols()); }
    int dim_q() const { return static_cast<int>(ts.cols()); }
    int dim_x() const { return static_cast<int>(ts.rows()); }
    int dim_y() const { return static_cast<int>(t.rows()); }
    Mat to_x(const Mat& pc) const { return ax_identity ? pc : Mat(ax * pc); }
    Mat to_y(const Mat& qc) const { return ay_identity ? qc : Mat(ay * qc); }
    Mat gram_p() const;
    Mat gram_q() const;
    // B[i][j] = <p_i, T* q_j> - <T p_i, q_j>
    Mat pairing() const;
};

struct LocalPair {
    LocalSpace primal;
    LocalSpace dual;
    FormOp op;
    FormOp adj;
    PairData data;
};

LocalPair make_local_pair(LocalSpace primal, LocalSpace dual, FormOp t, FormOp tstar);
LocalPair whitney_pair(const CellGeometry& cell, int k);

// The six primal subspaces (primal coordinates) and their dual mirrors.
struct LocalDecomposition {
    Subspace P0, ringP0, P0perp, PB, ringPB, PBperp;
    Subspace Q0, ringQ0, Q0perp, QB, ringQB, QBperp;
    double alpha = 1.0;
    double beta = 1.0;
};

LocalDecomposition decompose(const PairData& pair, const Tolerances& tol = {});
LocalDecomposition decompose_local(const LocalPair& pair, const Tolerances& tol = {});

// Inf-sup of two coordinate subspaces of one orthonormal ambient, with the
// convention value 1 when both are trivial.
double twisted_infsup(const Mat& a, const Mat& b, double tol = 1e-10);

}  // namespace padfeec
