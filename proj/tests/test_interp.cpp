#include "doctest.h"

#include "padfeec/gallery.hpp"
#include "padfeec/interp.hpp"

#include <random>

using namespace padfeec;

namespace {

std::shared_ptr<const Mesh> load(const char* src) { return std::make_shared<const Mesh>(mesh_from_source(src)); }

CellField constant_field(const PolyForm& p) {
    return [p](int) { return p; };
}

}  // namespace

TEST_CASE("local interpolators are projections") {
    Vec a(2), b(2), c(2);
    a << 0.1, 0.2;
    b << 1.3, 0.1;
    c << 0.4, 1.1;
    const CellGeometry cell({a, b, c});
    for (PairFamily f : {PairFamily::RT, PairFamily::CR, PairFamily::eFS, PairFamily::eBDM, PairFamily::eBDMlow}) {
        const LocalInterpolator s = make_interpolator(gallery_pair(cell, f));
        for (int i = 0; i < s.primal.dim(); ++i) {
            const Vec x = interpolate_local(s, s.primal.basis[i]);
            CHECK((x - Vec::Unit(s.primal.dim(), i)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("Crouzeix-Raviart closed form") {
    Vec a(2), b(2), c(2);
    a << -0.3, 0.0;
    b << 1.0, 0.4;
    c << 0.2, 0.9;
    const CellGeometry cell({a, b, c});
    const LocalInterpolator s = whitney_interpolator(cell, 0);
    for (unsigned seed = 0; seed < 10; ++seed) {
        const PolyForm v = random_form(2, 0, 2, seed);
        const PolyForm lhs = local_form(s.primal, interpolate_local(s, v));
        const PolyForm rhs = local_form(gallery_2d(cell, LocalTag::CR), cr_closed_form(cell, v));
        CHECK((lhs - rhs).max_abs_coeff() < 1e-12);
    }
}

TEST_CASE("global interpolation commutes with d and lands in the ABCFES") {
    for (const char* src : {"box:2", "hole:4", "box3:1"}) {
        const auto m = load(src);
        for (int k = 0; k < m->dim(); ++k) {
            const ConstraintSet cs = abcfes_by_constraints(m, k, BC::none).constraints;
            for (unsigned seed = 0; seed < 5; ++seed) {
                const CellField f = constant_field(random_form(m->dim(), k, 2, seed));
                CHECK(commute_check(m, k, f) < 1e-11);
                CHECK(constraint_residual(cs, interpolate_global(m, k, f)) < 1e-11);
            }
        }
    }
}

TEST_CASE("interpolation stability stays inside its bounds") {
    const auto m = load("box:2");
    std::vector<CellField> samples;
    for (unsigned s = 0; s < 8; ++s) samples.push_back(constant_field(random_form(2, 0, 2, 100 + s)));
    const StabilityReport r = stability_report(m, 0, samples);
    CHECK(r.ok);
    CHECK(r.energy_ratio <= r.energy_bound);
    CHECK(r.full_ratio <= r.full_bound);
    CHECK(r.gamma > 0.0);
}

TEST_CASE("random forms are reproducible") {
    const PolyForm a = random_form(3, 1, 2, 42), b = random_form(3, 1, 2, 42), c = random_form(3, 1, 2, 43);
    CHECK((a - b).is_zero());
    CHECK_FALSE((a - c).is_zero());
    CHECK(a.degree() <= 2);
}
