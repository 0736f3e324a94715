#pragma once

#include "padfeec/analysis.hpp"
#include "padfeec/interp.hpp"

#include <string>
#include <utility>
#include <vector>

namespace padfeec {

// Right-hand side: polynomial per cell (exact integration) or a sampled
// field (degree-6 quadrature).
struct SourceField {
    CellField poly;
    FormField func;
    bool polynomial() const { return static_cast<bool>(poly); }
};

// Canonical P0 coordinates of the cell-wise L2 projection of f.
Vec project_p0(const Mesh& mesh, int k, const SourceField& f);

struct SchemeSolution {
    std::string scheme;
    int k = 0;
    BC bc = BC::none;
    std::vector<std::pair<std::string, Vec>> unknowns;
    // Canonical P0 images used by the equivalence checks (P_omega, d_omega, ...).
    std::vector<std::pair<std::string, Vec>> derived;
    Vec pf;  // projected source
    double residual = 0.0;
    double condition = 0.0;
    const Vec& unknown(const std::string& name) const;
    const Vec& image(const std::string& name) const;
    std::string to_json() const;
};

struct EquivalenceReport {
    std::vector<std::pair<std::string, double>> residuals;
    bool pass = false;
    double worst() const;
    std::string to_json() const;
    std::string to_csv() const;
};

SchemeSolution solve_source_primal(std::shared_ptr<const Mesh> mesh, int k, BC bc, const SourceField& f,
                                   const Tolerances& tol = {});
SchemeSolution solve_source_dual(std::shared_ptr<const Mesh> mesh, int k, BC bc, const SourceField& f,
                                 const Tolerances& tol = {});
EquivalenceReport verify_source_equivalence(const SchemeSolution& primal, const SchemeSolution& dual);

struct EigenPair {
    std::vector<double> primal;  // nonzero finite eigenvalues, ascending
    std::vector<double> dual;
    int primal_zero = 0;
    int primal_infinite = 0;
    int dual_zero = 0;
    int dual_infinite = 0;
    double max_relative_gap = 0.0;
    bool match = false;
    std::string to_json() const;
};
EigenPair solve_eigen_pair(std::shared_ptr<const Mesh> mesh, int k, BC bc, const Tolerances& tol = {});

enum class HodgeScheme { complete, lowest_primal, mixed_primal, mixed_dual };
std::string scheme_name(HodgeScheme s);
HodgeScheme parse_scheme(const std::string& s);

SchemeSolution solve_hodge(std::shared_ptr<const Mesh> mesh, int k, BC bc, const SourceField& f, HodgeScheme scheme,
                           const Tolerances& tol = {});
// Order: complete, lowest_primal, mixed_primal, mixed_dual.
EquivalenceReport verify_hodge_equivalences(const std::vector<SchemeSolution>& sols);

// Energy error ||d_h w_h - d u|| of a primal source solution against an exact field du.
double energy_error(std::shared_ptr<const Mesh> mesh, int k, BC bc, const SchemeSolution& primal,
                    const FormField& du, const Tolerances& tol = {});

}  // namespace padfeec
