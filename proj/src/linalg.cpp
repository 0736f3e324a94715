#include "padfeec/linalg.hpp"

#include "padfeec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace padfeec {

namespace {

struct Svd {
    Vec s;
    Mat u, v;
    const Vec& singularValues() const { return s; }
    const Mat& matrixU() const { return u; }
    const Mat& matrixV() const { return v; }
};

template <class Solver>
Svd unpack(const Solver& d) {
    return {d.singularValues(), d.matrixU(), d.matrixV()};
}

bool factorization_ok(const Svd& f, const Mat& m, bool full_v) {
    if (!f.s.allFinite() || !f.u.allFinite() || !f.v.allFinite()) return false;
    const Eigen::Index p = f.s.size();
    const double scale = std::max(m.norm(), 1e-300);
    if ((f.u * f.s.asDiagonal() * f.v.leftCols(p).transpose() - m).norm() > 1e-10 * scale) return false;
    if (full_v && (f.v.transpose() * f.v - Mat::Identity(f.v.cols(), f.v.cols())).norm() > 1e-10) return false;
    return true;
}

// BDCSVD in Eigen 3.4.0 can return wrong or non-finite factors for matrices
// with many repeated singular values; the result is checked and recomputed
// with one-sided Jacobi when it does not reproduce the input.
Svd checked_svd(const Mat& m, bool full_v = false) {
    const unsigned flags = Eigen::ComputeThinU | (full_v ? Eigen::ComputeFullV : Eigen::ComputeThinV);
    Svd f = unpack(Eigen::BDCSVD<Mat>(m, flags));
    if (factorization_ok(f, m, full_v)) return f;
    return unpack(Eigen::JacobiSVD<Mat>(m, flags));
}

Svd thin_svd(const Mat& m) { return checked_svd(m); }

// scale > 0 sets an absolute floor, so a numerically zero restriction of a
// large operator is recognized as zero.
int rank_from(const Vec& sv, double tol, double scale = 0.0) {
    if (sv.size() == 0 || sv(0) <= 0.0) return 0;
    const double cut = tol * std::max(sv(0), scale);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++r;
    return r;
}

}  // namespace

void check_finite(const Mat& m, const char* what) {
    if (!m.allFinite()) throw InvalidMatrix(std::string(what) + " has non-finite entries");
}

Metric::Metric(const Mat& gram) : gram_(gram) {
    check_finite(gram, "gram");
    if (gram.rows() != gram.cols()) throw InvalidGram("gram is not square");
    if (gram.rows() == 0) return;
    const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
    if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvalidGram("gram is not symmetric");
    Eigen::LLT<Mat> llt(gram);
    if (llt.info() != Eigen::Success) throw InvalidGram("gram is not positive definite");
    lower_ = llt.matrixL();
    if (lower_.diagonal().minCoeff() <= 1e-12 * std::sqrt(scale))
        throw InvalidGram("gram is numerically singular");
}

Metric Metric::identity(int n) {
    Metric m;
    m.gram_ = Mat::Identity(n, n);
    m.identity_ = true;
    return m;
}

double Metric::norm(const Vec& a) const { return std::sqrt(std::max(0.0, inner(a, a))); }

Mat Metric::to_euclid(const Mat& x) const {
    if (identity_ || x.rows() == 0) return x;
    return lower_.transpose() * x;
}

Mat Metric::from_euclid(const Mat& y) const {
    if (identity_ || y.rows() == 0) return y;
    return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

std::vector<double> singular_values(const Mat& m) {
    check_finite(m, "matrix");
    if (m.size() == 0) return {};
    const Svd svd = checked_svd(m);
    const Vec& s = svd.singularValues();
    return std::vector<double>(s.data(), s.data() + s.size());
}

int numerical_rank(const Mat& m, double tol) {
    check_finite(m, "matrix");
    if (m.size() == 0) return 0;
    const Svd svd = checked_svd(m);
    return rank_from(svd.singularValues(), tol);
}

namespace {

// Connected components of the bipartite row/column graph of the nonzeros.
// Returns the column groups with their rows; a zero column is its own group.
std::vector<std::pair<std::vector<int>, std::vector<int>>> components(const Mat& m) {
    const int nr = static_cast<int>(m.rows()), nc = static_cast<int>(m.cols());
    std::vector<int> parent(static_cast<std::size_t>(nr + nc));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int j = 0; j < nc; ++j)
        for (int i = 0; i < nr; ++i)
            if (m(i, j) != 0.0) parent[find(nr + j)] = find(i);
    std::map<int, int> slot;
    std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
    auto group = [&](int x) -> auto& {
        const auto [it, fresh] = slot.emplace(find(x), static_cast<int>(out.size()));
        if (fresh) out.emplace_back();
        return out[it->second];
    };
    for (int j = 0; j < nc; ++j) group(nr + j).second.push_back(j);
    for (int i = 0; i < nr; ++i) {
        const int root = find(i);
        if (slot.count(root)) out[slot[root]].first.push_back(i);
    }
    return out;
}

}  // namespace

Subspace nullspace(const Mat& m, double tol, double scale) {
    check_finite(m, "matrix");
    if (!(tol > 0.0)) throw InvalidParameter("nullspace tolerance must be positive");
    const Eigen::Index n = m.cols();
    if (n == 0) return Subspace::zero(0);
    if (m.rows() == 0) return Subspace::full(static_cast<int>(n));
    const auto parts = n > 64 ? components(m) : decltype(components(m)){};
    if (parts.size() <= 1) {
        const Svd svd = checked_svd(m, true);
        const int r = rank_from(svd.singularValues(), tol, scale);
        return Subspace(svd.matrixV().rightCols(n - r));
    }
    // Block-diagonal after permutation: factor each block, then cut against
    // the largest singular value of the whole matrix.
    std::vector<Svd> f(parts.size());
    double top = 0.0;
    for (std::size_t b = 0; b < parts.size(); ++b) {
        const auto& [rows, cols] = parts[b];
        if (rows.empty()) continue;
        Mat sub(rows.size(), cols.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j) sub(i, j) = m(rows[i], cols[j]);
        f[b] = checked_svd(sub, true);
        if (f[b].s.size()) top = std::max(top, f[b].s(0));
    }
    const double cut = tol * std::max(top, scale);
    std::vector<Vec> basis;
    for (std::size_t b = 0; b < parts.size(); ++b) {
        const auto& cols = parts[b].second;
        const int nb = static_cast<int>(cols.size());
        int r = 0;
        for (Eigen::Index i = 0; i < f[b].s.size(); ++i) r += f[b].s(i) > cut;
        for (int c = r; c < nb; ++c) {
            Vec v = Vec::Zero(n);
            for (int j = 0; j < nb; ++j) v(cols[j]) = parts[b].first.empty() ? (j == c) : f[b].v(j, c);
            basis.push_back(v);
        }
    }
    Mat out(n, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t c = 0; c < basis.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = basis[c];
    return Subspace(out);
}

Subspace orthonormalize(const Mat& a, const Metric& g, double tol, double scale) {
    check_finite(a, "basis");
    if (a.cols() == 0) return Subspace::zero(static_cast<int>(a.rows()));
    const Mat y = g.to_euclid(a);
    auto svd = thin_svd(y);
    const int r = rank_from(svd.singularValues(), tol, scale);
    return Subspace(g.from_euclid(svd.matrixU().leftCols(r)));
}

Subspace span_sum(const Subspace& a, const Subspace& b, const Metric& g, double tol) {
    Mat ab(a.ambient(), a.dim() + b.dim());
    ab << a.basis, b.basis;
    return orthonormalize(ab, g, tol);
}

Subspace range_of(const Mat& t, const Subspace& d, const Metric& gy, double tol) {
    if (d.dim() == 0) return Subspace::zero(static_cast<int>(t.rows()));
    const double scale = gy.to_euclid(t).norm() * d.basis.colwise().norm().maxCoeff();
    return orthonormalize(t * d.basis, gy, tol, scale);
}

Subspace kernel_of(const Mat& t, const Subspace& d, const Metric& gx, const Metric& gy,
                   double tol) {
    const Subspace q = orthonormalize(d.basis, gx, tol);
    if (q.dim() == 0) return q;
    const Mat y = gy.to_euclid(t * q.basis);
    const double scale = gy.to_euclid(t).norm() * q.basis.colwise().norm().maxCoeff();
    return Subspace(q.basis * nullspace(y, tol, scale).basis);
}

Subspace annihilated_in(const Subspace& d, const Mat& c, double tol) {
    if (d.dim() == 0 || c.cols() == 0) return d;
    const Mat m = c.transpose() * d.basis;
    return Subspace(d.basis * nullspace(m, tol).basis);
}

double infsup(const Subspace& a, const Subspace& b, const Metric& g, double tol) {
    const Subspace qa = orthonormalize(a.basis, g, tol);
    const Subspace qb = orthonormalize(b.basis, g, tol);
    if (qa.dim() == 0 || qb.dim() == 0) return 0.0;
    if (qb.dim() < qa.dim()) return 0.0;
    const Mat c = qb.basis.transpose() * g.gram() * qa.basis;  // dimB x dimA
    const Svd svd = checked_svd(c);
    return svd.singularValues()(qa.dim() - 1);
}

double infsup(const Subspace& a, const Subspace& b, const Mat& gram) {
    return infsup(a, b, Metric(gram));
}

double containment_residual(const Subspace& a, const Subspace& b, const Metric& g) {
    const Subspace qa = orthonormalize(a.basis, g);
    if (qa.dim() == 0) return 0.0;
    const Subspace qb = orthonormalize(b.basis, g);
    if (qb.dim() == 0) return 1.0;
    const Mat r = qa.basis - qb.basis * (qb.basis.transpose() * g.gram() * qa.basis);
    const Mat y = g.to_euclid(r);
    const Svd svd = checked_svd(y);
    return std::min(1.0, svd.singularValues()(0));
}

double max_principal_angle(const Subspace& a, const Subspace& b, const Metric& g) {
    const double s = std::max(containment_residual(a, b, g), containment_residual(b, a, g));
    return std::asin(std::min(1.0, s));
}

std::pair<bool, double> subspace_equal(const Subspace& a, const Subspace& b, const Metric& g,
                                       double tol) {
    const int da = orthonormalize(a.basis, g).dim();
    const int db = orthonormalize(b.basis, g).dim();
    const double angle = max_principal_angle(a, b, g);
    return {da == db && angle <= tol, angle};
}

std::pair<bool, double> subspace_equal(const Subspace& a, const Subspace& b, const Mat& gram,
                                       double tol) {
    return subspace_equal(a, b, Metric(gram), tol);
}

Subspace gram_complement(const Subspace& a, const Subspace& b, const Metric& g,
                         const Tolerances& tol) {
    const Subspace qb = orthonormalize(b.basis, g, tol.rank);
    const Subspace qa = orthonormalize(a.basis, g, tol.rank);
    if (qa.dim() == 0) return qb;
    const double res = containment_residual(qa, qb, g);
    if (res > tol.containment)
        throw NotNested("subspace not contained in the outer space (sine " + std::to_string(res) + ")");
    const int r = qb.dim() - qa.dim();
    if (r <= 0) return Subspace::zero(qb.ambient());
    const Mat z = qb.basis - qa.basis * (qa.basis.transpose() * g.gram() * qb.basis);
    auto svd = thin_svd(g.to_euclid(z));
    return Subspace(g.from_euclid(svd.matrixU().leftCols(r)));
}

Subspace gram_complement(const Subspace& a, const Subspace& b, const Mat& gram) {
    return gram_complement(a, b, Metric(gram));
}

double cross_gram(const Subspace& a, const Subspace& b, const Metric& g) {
    const Subspace qa = orthonormalize(a.basis, g);
    const Subspace qb = orthonormalize(b.basis, g);
    if (qa.dim() == 0 || qb.dim() == 0) return 0.0;
    return (qa.basis.transpose() * g.gram() * qb.basis).cwiseAbs().maxCoeff();
}

double icr_of(const Mat& t, const Subspace& d, const Metric& gx, const Metric& gy,
              const Tolerances& tol) {
    check_finite(t, "operator");
    const Subspace q = orthonormalize(d.basis, gx, tol.rank);
    if (q.dim() == 0) return 0.0;
    const Mat y = gy.to_euclid(t * q.basis);
    const Svd svd = checked_svd(y);
    const Vec& s = svd.singularValues();
    const int r = rank_from(s, tol.rank);
    if (r == 0) return 0.0;
    const double smin = s(r - 1);
    if (smin * smin <= tol.eig * s(0) * s(0))
        throw NotClosedRange("restricted stiffness degenerate (lambda_min " +
                             std::to_string(smin * smin) + ")");
    return 1.0 / smin;
}

double icr_of(const Mat& t, const Subspace& d, const Mat& gram_x, const Mat& gram_y) {
    return icr_of(t, d, Metric(gram_x), Metric(gram_y));
}

SpectralReport generalized_eig(const Mat& k, const Mat& m, const Subspace& sub, double eig_tol) {
    check_finite(k, "stiffness");
    check_finite(m, "mass");
    SpectralReport rep;
    if (sub.dim() == 0) {
        rep.vectors = Mat(k.rows(), 0);
        return rep;
    }
    const Mat ks = sub.basis.transpose() * k * sub.basis;
    const Mat ms = sub.basis.transpose() * m * sub.basis;
    Eigen::LLT<Mat> llt(ms);
    if (llt.info() != Eigen::Success) throw InvalidGram("mass is not positive definite on the subspace");
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(ks, ms);
    if (es.info() != Eigen::Success) throw SolverFailure("generalized eigensolver did not converge");
    const Vec& lam = es.eigenvalues();
    const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    rep.values.resize(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        rep.values[i] = std::abs(lam(i)) <= eig_tol * scale ? 0.0 : lam(i);
    const Mat& v = es.eigenvectors();
    const double kn = std::max(1.0, ks.norm());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        const double r = (ks * v.col(i) - lam(i) * (ms * v.col(i))).norm() / (kn * std::max(1.0, v.col(i).norm()));
        rep.residual = std::max(rep.residual, r);
    }
    rep.vectors = sub.basis * v;
    return rep;
}

}  // namespace padfeec
