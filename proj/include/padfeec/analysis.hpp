#pragma once

#include "padfeec/spaces.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace padfeec {

// (T, D) and (T*, D*) inside a base pair; subspaces are in primal (P)
// and dual (Q) coordinates of the pair data.
struct OperatorPair {
    PairData base;
    Subspace domain;
    Subspace adjoint_domain;
    double pairing_residual = 0.0;  // max |B(v, q)| over orthonormal bases
    double roundtrip_angle = 0.0;
};

struct BasePairReport {
    int uM_dim = 0;
    int uN_dim = 0;
    int MB_dim = 0;
    int NB_dim = 0;
    double alpha = 1.0;
    double beta = 1.0;
    double kappa = 1.0;
    double varpi = 1.0;
    double chi = 1.0;
    double eps = 1.0;
    double icr_tilde = 0.0;        // icr(T, broken primal)
    double icr_under = 0.0;        // icr(T, uM)
    double icr_tilde_adj = 0.0;    // icr(T*, broken dual)
    double icr_under_adj = 0.0;
    std::vector<std::pair<std::string, bool>> assumptions;
    bool assumptions_ok() const;
    std::string to_json() const;
};

struct DecompositionReport {
    std::string name;
    std::vector<std::pair<std::string, int>> dims;
    double orthogonality_residual = 0.0;
    double identity_angle = 0.0;
    bool dims_match = true;
    bool pass = false;
    std::string note;
    int dim(const std::string& key) const;
    std::string to_json() const;
};

enum class HarmonicFlavor { abc, conforming, dual_conforming };

struct HarmonicSpace {
    Subspace space;  // canonical P0 coordinates
    int k = 0;
    HarmonicFlavor flavor = HarmonicFlavor::abc;
    BC bc = BC::none;
};

// B[i][j] = <v_i, T* q_j> - <T v_i, q_j> between two global spaces (d if
// the dual is one degree up, delta if one degree down).
Mat build_pairing(const GlobalSpace& primal, const GlobalSpace& dual);

// Generic report from pair data (global decomposition); ladder constants
// are left at their conventions.
BasePairReport base_pair_report(const PairData& pair, const Tolerances& tol = {});
// Whitney pair at degree k through the per-cell reduction, including the
// ladder constants from the next-level pair and the local harmonic slices.
BasePairReport whitney_base_pair_report(const Mesh& mesh, int k, const Tolerances& tol = {});

OperatorPair partial_adjoint_of(const Subspace& domain, const PairData& base, const Tolerances& tol = {});

struct CrtCheck {
    double icr_primal = 0.0;
    double icr_adjoint = 0.0;
    double bound_primal = 0.0;
    double bound_adjoint = 0.0;
    bool bound_ok = false;
};
CrtCheck quantified_crt_check(const OperatorPair& pair, const BasePairReport& report, const Tolerances& tol = {});

// Whitney pair: D = W^abc_h (bc none) or W^abc_{h0}, D* the matching conforming dual.
OperatorPair whitney_operator_pair(std::shared_ptr<const Mesh> mesh, int k, BC bc, const Tolerances& tol = {});

// Kernel / range pieces in canonical P0 coordinates.
Subspace kernel_p0(const GlobalSpace& space, DiffOp op, const Tolerances& tol = {});
Subspace range_p0(const GlobalSpace& space, DiffOp op, const Tolerances& tol = {});

// kernel minus range, checking the complex property first (NotAComplex).
HarmonicSpace harmonic_space(const Subspace& kernel, const Subspace& range, int k, HarmonicFlavor flavor,
                             BC bc, const Tolerances& tol = {});
HarmonicSpace discrete_harmonic(std::shared_ptr<const Mesh> mesh, int k, HarmonicFlavor flavor, BC bc,
                                const Tolerances& tol = {});

// Both decompositions of the pair at degree k:
//   P0^k = R(delta, W*) + N(d, W^abc),  P0^{k+1} = R(d, W^abc) + N(delta, W*)
// with (W^abc_h, W*_{h0}) for bc none and (W^abc_{h0}, W*_h) for homogeneous.
DecompositionReport helmholtz_check(std::shared_ptr<const Mesh> mesh, int k, BC bc, const Tolerances& tol = {});
// P0^k = R(d, W^abc Lambda^{k-1}) + H^abc + R(delta, W* Lambda^{k+1}).
DecompositionReport hodge_check(std::shared_ptr<const Mesh> mesh, int k, BC bc, const Tolerances& tol = {});
// H^abc_h = star H_{h0}^{n-k} and H^abc_{h0} = star H_h^{n-k}.
DecompositionReport pl_duality_check(std::shared_ptr<const Mesh> mesh, int k, const Tolerances& tol = {});
// Slices between the bc and no-bc pairs at degree k.
DecompositionReport horizontal_duality_check(std::shared_ptr<const Mesh> mesh, int k, const Tolerances& tol = {});
// R(d, W^abc Lambda^k) in N(d, W^abc Lambda^{k+1}) and the delta chain on W*,
// plus cohomology dimensions per degree.
DecompositionReport complex_check(std::shared_ptr<const Mesh> mesh, BC bc, const Tolerances& tol = {});

}  // namespace padfeec
