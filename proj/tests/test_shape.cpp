#include "doctest.h"

#include "padfeec/gallery.hpp"
#include "padfeec/mesh.hpp"
#include "padfeec/shape.hpp"

#include <cmath>
#include <random>

using namespace padfeec;

namespace {

CellGeometry tri(double x0, double y0, double x1, double y1, double x2, double y2) {
    Vec a(2), b(2), c(2);
    a << x0, y0;
    b << x1, y1;
    c << x2, y2;
    return CellGeometry({a, b, c});
}

CellGeometry random_tri(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-2, 2);
    for (;;) {
        const CellGeometry c = tri(u(rng), u(rng), u(rng), u(rng), u(rng), u(rng));
        if (c.volume() > 0.1) return c;
    }
}

int binom(int n, int k) { return k < 0 || k > n ? 0 : static_cast<int>(std::lround(std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)))); }

const CellGeometry& test_cell() {
    static const CellGeometry c = tri(0.1, 0.2, 1.3, 0.1, 0.4, 1.1);
    return c;
}

}  // namespace

TEST_CASE("Whitney local spaces are orthonormal with the constants first") {
    std::vector<Vec> v3 = {Vec::Zero(3), Vec::Unit(3, 0), Vec::Unit(3, 1), Vec::Unit(3, 2)};
    v3[3](0) = 0.2;
    const CellGeometry c3(v3);
    for (const CellGeometry* cell : {&test_cell(), &c3}) {
        const int n = cell->dim();
        for (int k = 0; k <= n; ++k)
            for (Variant var : {Variant::primal, Variant::dual}) {
                const LocalSpace s = whitney_local(*cell, k, var);
                // the dual space is the star of the primal one of degree n - k
                CHECK(s.dim() == (var == Variant::primal ? binom(n + 1, k + 1) : binom(n + 1, n - k + 1)));
                const Mat g = form_gram(s.basis, s.basis, *cell);
                CHECK((g - Mat::Identity(s.dim(), s.dim())).norm() < 1e-12);
                for (int i = 0; i < binom(n, k); ++i) CHECK(s.basis[i].degree() == 0);
            }
    }
}

TEST_CASE("Whitney forms reproduce the simplex functionals") {
    // int over sub-simplex s of the Whitney form of s' is delta_{s s'}
    const CellGeometry& cell = test_cell();
    for (int k = 0; k <= 2; ++k)
        for (const auto& s : combinations(3, k + 1))
            for (const auto& t : combinations(3, k + 1)) {
                std::vector<Vec> pts;
                for (int i : t) pts.push_back(cell.vertices()[i]);
                CHECK(integrate_on(whitney_form(cell, s), pts) == doctest::Approx(s == t ? 1.0 : 0.0).epsilon(1e-12));
            }
}

TEST_CASE("local Whitney pairs have unit constants") {
    std::vector<Vec> v3 = {Vec::Zero(3), Vec::Unit(3, 0), Vec::Unit(3, 1), Vec::Unit(3, 2)};
    v3[2](0) = 0.3;
    const CellGeometry c3(v3);
    for (const CellGeometry* cell : {&test_cell(), &c3})
        for (int k = 0; k < cell->dim(); ++k) {
            const LocalDecomposition d = decompose_local(whitney_pair(*cell, k));
            CHECK(d.alpha == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(d.beta == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(d.ringP0.dim() == 0);
            CHECK(d.ringQ0.dim() == 0);
        }
}

TEST_CASE("gallery dimensions") {
    const CellGeometry& c = test_cell();
    CHECK(gallery_2d(c, LocalTag::RT).dim() == 3);
    CHECK(gallery_2d(c, LocalTag::RTperp).dim() == 3);
    CHECK(gallery_2d(c, LocalTag::CR).dim() == 3);
    CHECK(gallery_2d(c, LocalTag::P1).dim() == 3);
    CHECK(gallery_2d(c, LocalTag::P2).dim() == 6);
    CHECK(gallery_2d(c, LocalTag::P1vec).dim() == 6);
    CHECK(gallery_2d(c, LocalTag::P2plus).dim() == 7);
    CHECK(gallery_2d(c, LocalTag::P1plus).dim() == 7);
}

TEST_CASE("local duality of RT against P1 and of RTperp against CR") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const CellGeometry c = random_tri(rng);
        const LocalSpace rt = gallery_2d(c, LocalTag::RT), p1 = gallery_2d(c, LocalTag::P1);
        const LocalSpace psi = gallery_2d(c, LocalTag::RTperp), cr = gallery_2d(c, LocalTag::CR);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double a = l2_inner(rt.basis[i], grad(p1.basis[j]), c) + l2_inner(div(rt.basis[i]), p1.basis[j], c);
                CHECK(std::abs(a - (i == j)) < 1e-12);
                const double b = l2_inner(psi.basis[i], curl(cr.basis[j]), c) - l2_inner(rot(psi.basis[i]), cr.basis[j], c);
                CHECK(std::abs(b - (i == j)) < 1e-12);
            }
    }
}

TEST_CASE("enriched pairs: frozen constants and the rotation mirror") {
    const CellGeometry& c = test_cell();
    const LocalDecomposition bdm = decompose_local(gallery_pair(c, PairFamily::eBDM));
    const LocalDecomposition fs = decompose_local(gallery_pair(c, PairFamily::eFS));
    const LocalDecomposition low = decompose_local(gallery_pair(c, PairFamily::eBDMlow));
    CHECK(bdm.P0.dim() == 1);
    CHECK(bdm.ringP0.dim() == 1);
    CHECK(bdm.P0perp.dim() == 0);
    CHECK(bdm.alpha == doctest::Approx(0.602399).epsilon(1e-5));
    CHECK(bdm.beta == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(low.ringP0.dim() == 1);
    CHECK(low.alpha == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fs.ringP0.dim() == 0);
    CHECK(fs.P0perp.dim() == 1);
    CHECK(fs.alpha == doctest::Approx(1.0).epsilon(1e-10));
    // rotating vectors by 90 degrees swaps the two families
    CHECK(fs.beta == doctest::Approx(bdm.alpha).epsilon(1e-10));
}

TEST_CASE("d maps Whitney k-forms onto closed Whitney (k+1)-forms") {
    const CellGeometry& c = test_cell();
    for (int k = 0; k < 2; ++k) {
        const LocalSpace s = whitney_local(c, k, Variant::primal);
        const LocalSpace t = whitney_local(c, k + 1, Variant::primal);
        const RangeKernel rk = local_range_kernel(s, DiffOp::d, t);
        CHECK(rk.residual < 1e-12);
        // dim ker = dim W^k - dim dW^k = binom(3, k+1) - binom(2, k+1)
        CHECK(rk.kernel.dim() == (k == 0 ? 1 : 2));
        CHECK(rk.range.dim() == s.dim() - rk.kernel.dim());
    }
}
