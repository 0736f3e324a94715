#include "doctest.h"

#include "padfeec/errors.hpp"
#include "padfeec/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <random>

using namespace padfeec;

namespace {

Mat random_mat(int r, int c, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = u(rng);
    return m;
}

// Reference nullspace dimension straight from Jacobi singular values.
int jacobi_nullity(const Mat& m, double tol) {
    Eigen::JacobiSVD<Mat> s(m);
    const Vec& sv = s.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) r += sv(i) > tol * sv(0);
    return static_cast<int>(m.cols()) - r;
}

}  // namespace

TEST_CASE("nullspace of a rank-deficient product") {
    const Mat m = random_mat(5, 3, 1) * random_mat(3, 8, 2);
    const Subspace ns = nullspace(m);
    CHECK(ns.dim() == 5);
    CHECK((m * ns.basis).norm() < 1e-12);
    CHECK((ns.basis.transpose() * ns.basis - Mat::Identity(5, 5)).norm() < 1e-12);
}

TEST_CASE("block-diagonal nullspace matches the dense answer") {
    // 30 blocks of 4x3 with rank 2, scattered by a permutation, plus zero columns.
    const int nb = 30;
    Mat m = Mat::Zero(4 * nb, 3 * nb + 5);
    for (int b = 0; b < nb; ++b)
        m.block(4 * b, 3 * b, 4, 3) = random_mat(4, 2, 10 + b) * random_mat(2, 3, 100 + b);
    Eigen::PermutationMatrix<Eigen::Dynamic> p(m.cols());
    p.setIdentity();
    std::shuffle(p.indices().data(), p.indices().data() + p.size(), std::mt19937(3));
    m = m * p;
    const Subspace ns = nullspace(m);
    CHECK(ns.dim() == jacobi_nullity(m, 1e-10));
    CHECK(ns.dim() == nb + 5);
    CHECK((m * ns.basis).norm() < 1e-11);
    CHECK((ns.basis.transpose() * ns.basis - Mat::Identity(ns.dim(), ns.dim())).norm() < 1e-11);
}

TEST_CASE("highly degenerate spectra are factored correctly") {
    // Many equal singular values; the divide-and-conquer SVD of some Eigen
    // releases mis-factors exactly this shape.
    Mat m = Mat::Zero(96, 96);
    for (int i = 0; i < 96; ++i) {
        m(i, i) = 24.0;
        m(i, (i + 1) % 96) = i % 3 == 0 ? 1.0 : 0.0;
    }
    const Subspace q = orthonormalize(m, Metric::identity(96));
    CHECK(q.dim() == 96);
    CHECK((q.basis.transpose() * q.basis - Mat::Identity(96, 96)).norm() < 1e-10);
}

TEST_CASE("metric orthonormalization and errors") {
    const Mat a = random_mat(6, 6, 4);
    const Mat g = a * a.transpose() + Mat::Identity(6, 6);
    const Metric mg(g);
    const Subspace q = orthonormalize(random_mat(6, 3, 5), mg);
    CHECK((q.basis.transpose() * g * q.basis - Mat::Identity(3, 3)).norm() < 1e-12);
    CHECK_THROWS_AS(Metric(Mat::Zero(3, 3)), InvalidGram);
    Mat ns = g;
    ns(0, 1) += 1.0;
    CHECK_THROWS_AS((Metric(ns)), InvalidGram);
    Mat bad = g;
    bad(2, 2) = NAN;
    CHECK_THROWS_AS(nullspace(bad), InvalidMatrix);
}

TEST_CASE("principal angle between two planes") {
    const double theta = 0.3;
    Mat a = Mat::Zero(3, 2), b = Mat::Zero(3, 2);
    a(0, 0) = 1;
    a(1, 1) = 1;
    b(0, 0) = 1;
    b(1, 1) = std::cos(theta);
    b(2, 1) = std::sin(theta);
    CHECK(max_principal_angle(Subspace(a), Subspace(b), Metric::identity(3)) == doctest::Approx(theta).epsilon(1e-13));
    CHECK(max_principal_angle(Subspace(a), Subspace(Mat(a * 2.0)), Metric::identity(3)) < 1e-15);
    // tiny angles keep their relative accuracy
    b(1, 1) = std::cos(1e-9);
    b(2, 1) = std::sin(1e-9);
    CHECK(max_principal_angle(Subspace(a), Subspace(b), Metric::identity(3)) == doctest::Approx(1e-9).epsilon(1e-6));
}

TEST_CASE("inf-sup and closed-range index on diagonal data") {
    Mat a = Mat::Zero(3, 1), b = Mat::Zero(3, 1);
    a(0, 0) = 1;
    b(0, 0) = 0.6;
    b(1, 0) = 0.8;
    CHECK(infsup(Subspace(a), Subspace(b), Metric::identity(3)) == doctest::Approx(0.6));
    Mat t = Mat::Zero(3, 3);
    t(0, 0) = 4;
    t(1, 1) = 0.5;
    CHECK(icr_of(t, Subspace::full(3), Metric::identity(3), Metric::identity(3)) == doctest::Approx(2.0));
    t(1, 1) = 1e-7;
    CHECK_THROWS_AS(icr_of(t, Subspace::full(3), Metric::identity(3), Metric::identity(3)), NotClosedRange);
}

TEST_CASE("gram complement is orthogonal and fills the outer space") {
    const Mat g = Mat::Identity(5, 5);
    const Subspace outer(random_mat(5, 4, 6));
    const Subspace inner(Mat(outer.basis.leftCols(2) * random_mat(2, 2, 7)));
    const Subspace c = gram_complement(inner, outer, Metric(g));
    CHECK(c.dim() == 2);
    CHECK(cross_gram(c, inner, Metric(g)) < 1e-12);
    CHECK(containment_residual(c, outer, Metric(g)) < 1e-12);
    CHECK_THROWS_AS(gram_complement(Subspace(random_mat(5, 1, 8)), outer, Metric(g)), NotNested);
}

TEST_CASE("generalized eigenproblem on a subspace") {
    Mat k = Mat::Zero(3, 3), m = Mat::Identity(3, 3);
    k(0, 0) = 2;
    k(1, 1) = 5;
    m(1, 1) = 5;
    const SpectralReport r = generalized_eig(k, m, Subspace::full(3));
    REQUIRE(r.values.size() == 3);
    CHECK(r.values[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.values[1] == doctest::Approx(1.0));
    CHECK(r.values[2] == doctest::Approx(2.0));
}
