#pragma once

#include "padfeec/analysis.hpp"
#include "padfeec/quadrature.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace padfeec {

// Adjoint projection on one cell. The three condition blocks are stacked
// into one square system in the primal basis.
struct LocalInterpolator {
    LocalSpace primal;
    LocalSpace dual;  // empty at the top degree, where only the L2 block remains
    FormOp op;
    FormOp adj;
    LocalDecomposition dec;
    std::vector<PolyForm> qb;    // dual P_B forms
    std::vector<PolyForm> ring;  // ring-P0 forms
    std::vector<PolyForm> perp;  // P0-perp forms
    Mat system;
    Eigen::PartialPivLU<Mat> lu;
};

LocalInterpolator make_interpolator(const LocalPair& pair, const Tolerances& tol = {});
// Whitney pair at degree k; k = n gives the L2 projection onto P0.
LocalInterpolator whitney_interpolator(const CellGeometry& cell, int k, const Tolerances& tol = {});

Vec interpolate_local(const LocalInterpolator& interp, const PolyForm& w);
// Non-polynomial input: value and op(value) sampled by degree-6 quadrature (not exact).
Vec interpolate_local(const LocalInterpolator& interp, const FormField& w, const FormField& op_w);
PolyForm local_form(const LocalSpace& space, const Vec& coeffs);

// I v = sum_i (int_{e_i} v) b_i, e_i opposite vertex i.
Vec cr_closed_form(const CellGeometry& cell, const PolyForm& v);

using CellField = std::function<PolyForm(int cell)>;

// Broken coordinates in the primal Whitney layout of degree k.
Vec interpolate_global(std::shared_ptr<const Mesh> mesh, int k, const CellField& w, const Tolerances& tol = {});
// max |constraint . v| relative to the norm of v.
double constraint_residual(const ConstraintSet& c, const Vec& v);
// ||d_h I^k w - I^{k+1} d w||, absolute L2 norm.
double commute_check(std::shared_ptr<const Mesh> mesh, int k, const CellField& w, const Tolerances& tol = {});

struct StabilityReport {
    double energy_ratio = 0.0;  // max ||d_h I w|| / ||d w||
    double full_ratio = 0.0;    // max ||I w||_T / ||w||_T
    double beta = 1.0;
    double gamma = 1.0;
    double rho = 0.0;
    double energy_bound = 0.0;  // 1 + 1/beta
    double full_bound = 0.0;    // 2 + rho + 1/gamma + 1/beta
    bool ok = false;
};

// gamma_K over the T-graph norms of P_B and the dual P_B.
double gamma_local(const PairData& pair, const LocalDecomposition& dec, const Tolerances& tol = {});
StabilityReport stability_report(std::shared_ptr<const Mesh> mesh, int k, const std::vector<CellField>& samples,
                                 const Tolerances& tol = {});

// Random k-form with coefficients of total degree <= degree, entries in [-1, 1].
PolyForm random_form(int n, int k, int degree, std::uint64_t seed);

}  // namespace padfeec
