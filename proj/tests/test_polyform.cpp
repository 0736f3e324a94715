#include "doctest.h"

#include "padfeec/errors.hpp"
#include "padfeec/interp.hpp"
#include "padfeec/polyform.hpp"
#include "padfeec/quadrature.hpp"

#include <cmath>
#include <random>

using namespace padfeec;

namespace {

CellGeometry random_cell(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    for (;;) {
        std::vector<Vec> v(n + 1, Vec(n));
        for (auto& p : v)
            for (int i = 0; i < n; ++i) p(i) = u(rng);
        Mat e(n, n);
        for (int i = 0; i < n; ++i) e.col(i) = v[i + 1] - v[0];
        if (std::abs(e.determinant()) > 0.05) return CellGeometry(v);
    }
}

double factorial(int m) { return std::tgamma(m + 1.0); }

Vec point(double x, double y) { return (Vec(2) << x, y).finished(); }

// Exponent vectors of total degree r in n variables.
std::vector<std::vector<int>> exponents(int n, int r) {
    if (n == 1) return {{r}};
    std::vector<std::vector<int>> out;
    for (int e = 0; e <= r; ++e)
        for (auto rest : exponents(n - 1, r - e)) {
            rest.insert(rest.begin(), e);
            out.push_back(rest);
        }
    return out;
}

}  // namespace

TEST_CASE("d squared vanishes") {
    for (int n = 2; n <= 3; ++n)
        for (int k = 0; k <= n; ++k)
            for (unsigned s = 0; s < 5; ++s) {
                const PolyForm w = random_form(n, k, 3, s);
                if (k + 2 <= n) CHECK(exterior_derivative(exterior_derivative(w)).max_abs_coeff() < 1e-13);
                if (k >= 2) CHECK(codifferential(codifferential(w)).max_abs_coeff() < 1e-13);
            }
}

TEST_CASE("homotopy formula for the Koszul operator") {
    // d kappa + kappa d = (k + r) on homogeneous forms of degree r
    for (int n = 1; n <= 3; ++n)
        for (int k = 0; k <= n; ++k)
            for (int r = 0; r <= 2; ++r) {
                PolyForm w(n, k);
                std::mt19937 rng(17 * n + 5 * k + r);
                std::uniform_real_distribution<double> u(-1, 1);
                for (const auto& a : multi_indices(n, k))
                    for (const auto& e : exponents(n, r)) w.add_term(e, a, u(rng));
                PolyForm lhs(n, k);
                if (k >= 1) lhs += exterior_derivative(koszul(w));
                if (k < n) lhs += koszul(exterior_derivative(w));
                CHECK((lhs - (k + r) * w).max_abs_coeff() < 1e-12);
            }
}

TEST_CASE("hodge star is an involution up to sign") {
    for (int n = 1; n <= 3; ++n)
        for (int k = 0; k <= n; ++k) {
            const PolyForm w = random_form(n, k, 2, 40 + k);
            const double sign = (k * (n - k)) % 2 ? -1.0 : 1.0;
            CHECK((hodge_star(hodge_star(w)) - sign * w).max_abs_coeff() < 1e-14);
        }
}

TEST_CASE("codifferential is the adjoint of d against bubbles") {
    // eta = bubble * random form vanishes on the boundary, so no trace term appears.
    // The cubic bubble needs n = 2 under the degree cap.
    {
        const int n = 2;
        const CellGeometry cell = random_cell(n, 7 + n);
        PolyForm bubble = PolyForm::scalar(n, 1.0);
        for (int i = 0; i <= n; ++i) bubble = wedge(bubble, PolyForm::barycentric(cell, i));
        for (int k = 0; k < n; ++k) {
            const PolyForm w = random_form(n, k, 1, 3 + k);
            const PolyForm eta = wedge(bubble, random_form(n, k + 1, 0, 9 + k));
            const double lhs = l2_inner(exterior_derivative(w), eta, cell);
            const double rhs = l2_inner(w, codifferential(eta), cell);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
        }
    }
}

TEST_CASE("exact barycentric moments") {
    // int_T lambda^a = n! a! |T| / (n + |a|)!
    // a well-shaped cell: monomial coefficients of lambda^6 grow like |grad lambda|^6,
    // so thin cells lose digits to cancellation before integration
    const CellGeometry cell({point(0.1, 0.2), point(1.3, 0.4), point(0.5, 1.1)});
    const PolyForm l0 = PolyForm::barycentric(cell, 0), l1 = PolyForm::barycentric(cell, 1);
    const PolyForm a = wedge(wedge(l0, l0), l1);  // lambda0^2 lambda1
    const PolyForm b = wedge(l0, wedge(l1, l1));  // lambda0 lambda1^2
    const double oracle = factorial(2) * factorial(3) * factorial(3) * cell.volume() / factorial(8);
    CHECK(l2_inner(a, b, cell) == doctest::Approx(oracle).epsilon(1e-12));
    const CellGeometry c3 = random_cell(3, 4);
    const PolyForm m0 = PolyForm::barycentric(c3, 0), m3 = PolyForm::barycentric(c3, 3);
    CHECK(l2_inner(m0, m3, c3) == doctest::Approx(factorial(3) * c3.volume() / factorial(5)).epsilon(1e-12));
    // on a thin cell the error stays at round-off relative to the expansion scale
    const CellGeometry thin = random_cell(2, 3);
    const double kappa = thin.diameter() * thin.bary_grad().rowwise().norm().maxCoeff();
    const PolyForm t0 = PolyForm::barycentric(thin, 0), t1 = PolyForm::barycentric(thin, 1);
    const double exact = factorial(2) * factorial(3) * factorial(3) * thin.volume() / factorial(8);
    const double got = l2_inner(wedge(wedge(t0, t0), t1), wedge(t0, wedge(t1, t1)), thin);
    CHECK(std::abs(got - exact) <= 1e-15 * std::pow(kappa, 6) * exact);
}

TEST_CASE("Stokes on a simplex") {
    for (int n = 2; n <= 3; ++n) {
        const CellGeometry cell = random_cell(n, 20 + n);
        const PolyForm w = random_form(n, n - 1, 3, 77);
        double boundary = 0.0;
        for (int i = 0; i <= n; ++i) {
            std::vector<Vec> face;
            for (int j = 0; j <= n; ++j)
                if (j != i) face.push_back(cell.vertices()[j]);
            boundary += (i % 2 ? -1.0 : 1.0) * integrate_on(w, face);
        }
        std::vector<Vec> all = cell.vertices();
        CHECK(integrate_on(exterior_derivative(w), all) == doctest::Approx(boundary).epsilon(1e-11));
    }
}

TEST_CASE("quadrature rules are exact to their degree") {
    for (int n = 1; n <= 3; ++n) {
        const CellGeometry cell = random_cell(n, 50 + n);
        for (int deg = 1; deg <= 6; ++deg) {
            const QuadRule q = simplex_rule(n, deg);
            double wsum = 0.0;
            for (double w : q.weights) wsum += w;
            CHECK(wsum == doctest::Approx(1.0).epsilon(1e-13));
            const PolyForm f = random_form(n, 0, deg / 2, 3 * deg);
            const PolyForm g = random_form(n, 0, deg - deg / 2, 5 * deg);
            CHECK(quad_inner(f, g, cell, deg) == doctest::Approx(l2_inner(f, g, cell)).epsilon(1e-11));
        }
    }
}

TEST_CASE("degree overflow is reported") {
    const PolyForm c = random_form(2, 0, 3, 1);
    CHECK_THROWS_AS(wedge(c, PolyForm::coordinate(2, 0)), DegreeOverflow);
}
