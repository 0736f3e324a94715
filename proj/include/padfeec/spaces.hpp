#pragma once

#include "padfeec/mesh.hpp"
#include "padfeec/shape.hpp"

#include <memory>
#include <string>
#include <vector>

namespace padfeec {

enum class BC { none, homogeneous };
enum class LocalFamily { primal, dual, p0, mixed };
enum class SpaceKind { broken, conforming, conforming0, star, star0, abc, abc0, p0, mixed, vm, vm0 };

std::string bc_name(BC bc);
BC parse_bc(const std::string& s);
std::string kind_name(SpaceKind k);
inline BC swap_bc(BC bc) { return bc == BC::none ? BC::homogeneous : BC::none; }

CellGeometry cell_geometry(const Mesh& mesh, int c);

// Per-cell L2-orthonormal local bases, concatenated cell by cell. These
// are the "broken coordinates" every global space is expressed in.
struct BrokenLayout {
    std::shared_ptr<const Mesh> mesh;
    int k = 0;
    LocalFamily family = LocalFamily::primal;
    std::vector<LocalSpace> local;
    std::vector<int> offset;
    int dim = 0;

    int local_dim(int c) const { return local[c].dim(); }
};
using LayoutPtr = std::shared_ptr<const BrokenLayout>;

LayoutPtr make_layout(std::shared_ptr<const Mesh> mesh, int k, LocalFamily family);

struct GlobalSpace {
    LayoutPtr layout;
    SpaceKind kind = SpaceKind::broken;
    int k = 0;
    Mat basis;              // broken coordinates, one column per DOF
    bool identity = false;  // basis is the identity (broken spaces)
    Mat gram_l2;
    Mat gram_energy;        // L2 of d (primal), delta (dual), both (mixed)
    int constraint_rank = 0;

    int dofs() const { return identity ? layout->dim : static_cast<int>(basis.cols()); }
    int broken_dim() const { return layout->dim; }
    Mat coords() const { return identity ? Mat(Mat::Identity(layout->dim, layout->dim)) : basis; }
    const Mesh& mesh() const { return *layout->mesh; }
    int dim() const { return layout->mesh->dim(); }
};

// Block-diagonal matrix of local maps: entry (i, j) of cell block is
// <fa(a_i), fb(b_j)> over the cell.
Mat broken_inner(const BrokenLayout& a, const FormOp& fa, const BrokenLayout& b, const FormOp& fb);
// Matrix of op: src -> dst in broken coordinates (L2 projection, exact when
// the image lies in dst). Throws AssemblyError if it does not.
Mat broken_op(const BrokenLayout& src, DiffOp op, const BrokenLayout& dst);
// L2 projection onto piecewise constant k-forms in canonical coordinates
// dx^alpha / sqrt|T|.
Mat p0_projection(const BrokenLayout& src);
// Star between canonical P0 coordinates of degree j and n - j.
Mat p0_star(const Mesh& mesh, int j);
// B[i][j] = <a_i, adj b_j> - <op a_i, b_j>, op = d (b one degree up) or delta (one down).
Mat broken_pairing(const BrokenLayout& a, DiffOp op, const BrokenLayout& b);

GlobalSpace broken_space(std::shared_ptr<const Mesh> mesh, int k, Variant v);
GlobalSpace p0_space(std::shared_ptr<const Mesh> mesh, int k);
GlobalSpace conforming_whitney(std::shared_ptr<const Mesh> mesh, int k, BC bc);
// Cell-wise star of a conforming space; coefficients carry over unchanged.
GlobalSpace star_space(const GlobalSpace& space);
// W*_h (bc none) or W*_{h0} (homogeneous) of degree k.
GlobalSpace conforming_dual(std::shared_ptr<const Mesh> mesh, int k, BC bc);

// Max coefficient gap of traces across interior facets (primal conforming kinds).
double trace_continuity_defect(const GlobalSpace& space);

struct ConstraintSet {
    Mat rows;  // one functional per constraining basis function, broken coordinates
    int rank = 0;
};

struct AbcResult {
    GlobalSpace space;
    ConstraintSet constraints;
};

// W^abc_h (bc none, constrained by W*_{h0}) or W^abc_{h0} (homogeneous, by W*_h).
AbcResult abcfes_by_constraints(std::shared_ptr<const Mesh> mesh, int k, BC bc, const Tolerances& tol = {});

enum class BasisCategory { type_i, type_ii };

struct BasisFunction {
    BasisCategory category = BasisCategory::type_i;
    int anchor = -1;  // cell (Type-I) or constraining sub-simplex (Type-II)
    std::vector<int> cells;
    std::vector<Vec> coeffs;  // local coefficients on each support cell
};

struct BasisAtlas {
    LayoutPtr layout;
    std::vector<BasisFunction> functions;
    int count(BasisCategory c) const;
    // Type-II functions grouped by anchor.
    std::vector<int> type_ii_per_anchor(int anchors) const;
    Mat to_broken() const;
};

// Locally supported basis of the same space. Throws AssumptionViolation
// naming the cell where the restricted dual functions are dependent.
BasisAtlas abcfes_local_basis(std::shared_ptr<const Mesh> mesh, int k, BC bc, const Tolerances& tol = {});

// Lowest-degree primal Hodge space: mixed local forms paired to zero with
// W*_{h0}Lambda^{k+1} through d and with W^abc_h Lambda^{k-1} through delta
// (bc none); homogeneous swaps to W*_h and W^abc_{h0}.
GlobalSpace vm_space(std::shared_ptr<const Mesh> mesh, int k, BC bc, const Tolerances& tol = {});

// Global pair data for (d, broken primal k) / (delta, broken dual k+1).
PairData whitney_pair_data(std::shared_ptr<const Mesh> mesh, int k);

std::string space_summary_json(const GlobalSpace& space, const BasisAtlas* atlas = nullptr);

}  // namespace padfeec
