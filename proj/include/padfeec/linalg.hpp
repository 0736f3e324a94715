#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace padfeec {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct Tolerances {
    double rank = 1e-10;      // relative to the largest singular value
    double eig = 1e-10;
    double identity = 1e-8;   // max principal angle for subspace identities
    double containment = 1e-8;
};

// Columns span the subspace; ambient dimension is rows().
struct Subspace {
    Mat basis;

    Subspace() = default;
    explicit Subspace(Mat b) : basis(std::move(b)) {}
    static Subspace zero(int ambient) { return Subspace(Mat(ambient, 0)); }
    static Subspace full(int ambient) { return Subspace(Mat::Identity(ambient, ambient)); }

    int ambient() const { return static_cast<int>(basis.rows()); }
    int dim() const { return static_cast<int>(basis.cols()); }
};

// SPD Gram matrix with its Cholesky factor G = L L^T cached.
class Metric {
public:
    Metric() = default;
    explicit Metric(const Mat& gram);
    static Metric identity(int n);

    const Mat& gram() const { return gram_; }
    int dim() const { return static_cast<int>(gram_.rows()); }
    double inner(const Vec& a, const Vec& b) const { return a.dot(gram_ * b); }
    double norm(const Vec& a) const;
    // Coordinates in which the metric becomes Euclidean: y = L^T x.
    Mat to_euclid(const Mat& x) const;
    Mat from_euclid(const Mat& y) const;

private:
    Mat gram_;
    Mat lower_;
    bool identity_ = false;
};

struct SpectralReport {
    std::vector<double> values;
    Mat vectors;
    double residual = 0.0;
};

void check_finite(const Mat& m, const char* what);

int numerical_rank(const Mat& m, double tol = 1e-10);
std::vector<double> singular_values(const Mat& m);

// Euclidean-orthonormal basis of {v : |Mv| <= tol max(|M|, scale) |v|}.
Subspace nullspace(const Mat& m, double tol = 1e-10, double scale = 0.0);

// G-orthonormal basis of the column span of a, dependent columns dropped.
Subspace orthonormalize(const Mat& a, const Metric& g, double tol = 1e-10, double scale = 0.0);
Subspace span_sum(const Subspace& a, const Subspace& b, const Metric& g, double tol = 1e-10);

// Image T(D) as a gy-orthonormal subspace of the target.
Subspace range_of(const Mat& t, const Subspace& d, const Metric& gy, double tol = 1e-10);
// N(T) restricted to D, gx-orthonormal.
Subspace kernel_of(const Mat& t, const Subspace& d, const Metric& gx, const Metric& gy,
                   double tol = 1e-10);
// {v in D : <v, c_j> = 0 for every column of c}, gx-orthonormal.
Subspace annihilated_in(const Subspace& d, const Mat& constraints_by_column, double tol = 1e-10);

double infsup(const Subspace& a, const Subspace& b, const Metric& g, double tol = 1e-10);
double infsup(const Subspace& a, const Subspace& b, const Mat& gram);

// Largest principal angle measured through sines, accurate for tiny angles.
double max_principal_angle(const Subspace& a, const Subspace& b, const Metric& g);
std::pair<bool, double> subspace_equal(const Subspace& a, const Subspace& b, const Metric& g,
                                       double tol);
std::pair<bool, double> subspace_equal(const Subspace& a, const Subspace& b, const Mat& gram,
                                       double tol);

// sin of the largest angle between a vector of A and its projection onto B.
double containment_residual(const Subspace& a, const Subspace& b, const Metric& g);

Subspace gram_complement(const Subspace& a, const Subspace& b, const Metric& g,
                         const Tolerances& tol = {});
Subspace gram_complement(const Subspace& a, const Subspace& b, const Mat& gram);

// Largest |<a_i, b_j>_G| over G-orthonormalized bases.
double cross_gram(const Subspace& a, const Subspace& b, const Metric& g);

double icr_of(const Mat& t, const Subspace& d, const Metric& gx, const Metric& gy,
              const Tolerances& tol = {});
double icr_of(const Mat& t, const Subspace& d, const Mat& gram_x, const Mat& gram_y);

SpectralReport generalized_eig(const Mat& k, const Mat& m, const Subspace& sub,
                               double eig_tol = 1e-10);

}  // namespace padfeec
