#include "doctest.h"

#include "padfeec/errors.hpp"
#include "padfeec/solvers.hpp"

#include <cmath>

using namespace padfeec;

namespace {

std::shared_ptr<const Mesh> load(const char* src) { return std::make_shared<const Mesh>(mesh_from_source(src)); }

SourceField poly_source(int n, int k, unsigned seed) {
    SourceField f;
    const PolyForm p = random_form(n, k, 2, seed);
    f.poly = [p](int) { return p; };
    return f;
}

}  // namespace

TEST_CASE("P0 projection of a constant is exact") {
    const Mesh m = mesh_from_source("box:2");
    SourceField f;
    f.poly = [](int) { return PolyForm::scalar(2, 3.0); };
    const Vec pf = project_p0(m, 0, f);
    // canonical coordinates carry sqrt|T|
    for (int c = 0; c < m.num_cells(); ++c) CHECK(pf(c) == doctest::Approx(3.0 * std::sqrt(m.volume(c))));
    SourceField g;
    g.func = [](const Vec&) { return Vec::Constant(1, 3.0); };
    CHECK((project_p0(m, 0, g) - pf).norm() < 1e-13);
}

TEST_CASE("source problems: primal and dual agree") {
    for (const char* src : {"box:2", "hole:4"}) {
        const auto m = load(src);
        for (int k = 0; k < 2; ++k)
            for (BC bc : {BC::none, BC::homogeneous}) {
                const SourceField f = poly_source(2, k, 7 + k);
                const EquivalenceReport e =
                    verify_source_equivalence(solve_source_primal(m, k, bc, f), solve_source_dual(m, k, bc, f));
                CHECK(e.pass);
                CHECK(e.worst() < 1e-9);
            }
    }
}

TEST_CASE("eigenvalues: nonzero spectra coincide") {
    const auto m = load("hole:4");
    for (int k = 0; k < 2; ++k)
        for (BC bc : {BC::none, BC::homogeneous}) {
            const EigenPair e = solve_eigen_pair(m, k, bc);
            CHECK(e.match);
            CHECK(e.primal.size() == e.dual.size());
        }
}

TEST_CASE("Neumann eigenvalue approaches pi squared") {
    const EigenPair e = solve_eigen_pair(load("box:8"), 0, BC::none);
    REQUIRE_FALSE(e.primal.empty());
    CHECK(e.primal_zero == 1);
    CHECK(std::abs(e.primal.front() - M_PI * M_PI) < 0.1 * M_PI * M_PI);
}

TEST_CASE("four Hodge-Laplace schemes agree") {
    const auto m = load("hole:4");
    for (int k = 0; k <= 2; ++k)
        for (BC bc : {BC::none, BC::homogeneous}) {
            const SourceField f = poly_source(2, k, 31 + k);
            std::vector<SchemeSolution> sols;
            for (HodgeScheme s :
                 {HodgeScheme::complete, HodgeScheme::lowest_primal, HodgeScheme::mixed_primal, HodgeScheme::mixed_dual})
                sols.push_back(solve_hodge(m, k, bc, f, s));
            const EquivalenceReport e = verify_hodge_equivalences(sols);
            CHECK(e.pass);
            CHECK(e.residuals.size() == 18);
        }
}

TEST_CASE("harmonic part is the projection onto discrete harmonic forms") {
    // f harmonic-free on the box: theta vanishes; on the hole a constant 1-form has a harmonic part.
    SourceField f;
    f.poly = [](int) { return PolyForm::dx(2, {0}, 1.0); };
    const SchemeSolution box = solve_hodge(load("box:4"), 1, BC::none, f, HodgeScheme::complete);
    CHECK(box.image("theta").norm() < 1e-12);
    const SchemeSolution hole = solve_hodge(load("hole:4"), 1, BC::homogeneous, f, HodgeScheme::complete);
    CHECK(hole.residual < 1e-10);
}

TEST_CASE("scheme names round trip") {
    for (HodgeScheme s : {HodgeScheme::complete, HodgeScheme::lowest_primal, HodgeScheme::mixed_primal, HodgeScheme::mixed_dual})
        CHECK(parse_scheme(scheme_name(s)) == s);
    CHECK_THROWS_AS(parse_scheme("bogus"), InvalidParameter);
}

TEST_CASE("energy error decreases under refinement") {
    // -div grad u + u = f with u = cos(pi x) cos(pi y), Neumann data vanishes
    SourceField f;
    f.func = [](const Vec& x) {
        return Vec::Constant(1, (2 * M_PI * M_PI + 1) * std::cos(M_PI * x(0)) * std::cos(M_PI * x(1)));
    };
    const FormField du = [](const Vec& x) {
        Vec g(2);
        g << -M_PI * std::sin(M_PI * x(0)) * std::cos(M_PI * x(1)), -M_PI * std::cos(M_PI * x(0)) * std::sin(M_PI * x(1));
        return g;
    };
    double prev = INFINITY;
    for (const char* src : {"box:2", "box:4", "box:8"}) {
        const auto m = load(src);
        const double err = energy_error(m, 0, BC::none, solve_source_primal(m, 0, BC::none, f), du);
        CHECK(err < prev);
        prev = err;
    }
}
