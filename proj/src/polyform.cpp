#include "padfeec/polyform.hpp"

#include "padfeec/errors.hpp"
#include "padfeec/mesh.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace padfeec {

namespace {

constexpr int kBase = 8;
constexpr int kMomentDegree = 2 * kMaxPolyDegree;

int pow_base(int e) {
    int r = 1;
    for (int i = 0; i < e; ++i) r *= kBase;
    return r;
}

double factorial(int m) {
    double r = 1.0;
    for (int i = 2; i <= m; ++i) r *= i;
    return r;
}

int popcount(int m) { return __builtin_popcount(static_cast<unsigned>(m)); }

// Sign of dx^a ^ dx^b relative to sorted order; 0 when they overlap.
int wedge_sign(int ma, int mb) {
    if (ma & mb) return 0;
    int inversions = 0;
    for (int j = 0; j < 31; ++j)
        if (mb & (1 << j)) inversions += popcount(ma & ~((2 << j) - 1));
    return (inversions % 2) ? -1 : 1;
}

// Polynomial in barycentric coordinates, exponents packed base 8.
using LamPoly = std::map<int, double>;

}  // namespace

std::vector<MultiIndex> multi_indices(int n, int k) { return combinations(n, k); }

int axes_mask(const MultiIndex& a) {
    int m = 0;
    for (int x : a) m |= 1 << x;
    return m;
}

MultiIndex mask_axes(int mask) {
    MultiIndex a;
    for (int j = 0; j < 31; ++j)
        if (mask & (1 << j)) a.push_back(j);
    return a;
}

int mono_code(const std::vector<int>& exps) {
    int code = 0;
    for (size_t i = 0; i < exps.size(); ++i) {
        if (exps[i] < 0 || exps[i] >= kBase) throw DegreeOverflow("monomial exponent out of range");
        code += exps[i] * pow_base(static_cast<int>(i));
    }
    return code;
}

std::vector<int> mono_exps(int code, int n) {
    std::vector<int> e(n);
    for (int i = 0; i < n; ++i) {
        e[i] = code % kBase;
        code /= kBase;
    }
    return e;
}

int mono_degree(int code, int n) {
    int d = 0;
    for (int i = 0; i < n; ++i) {
        d += code % kBase;
        code /= kBase;
    }
    return d;
}

CellGeometry::CellGeometry(const std::vector<Vec>& vertices) : vertices_(vertices) {
    n_ = static_cast<int>(vertices.size()) - 1;
    if (n_ < 1 || n_ > 3) throw InvalidParameter("cell geometry supports n = 1..3");
    Mat a(n_ + 1, n_ + 1);
    for (int j = 0; j <= n_; ++j) {
        if (vertices[j].size() != n_) throw InvalidParameter("vertex dimension mismatch");
        a.block(0, j, n_, 1) = vertices[j];
        a(n_, j) = 1.0;
    }
    Mat e(n_, n_);
    for (int j = 0; j < n_; ++j) e.col(j) = vertices[j + 1] - vertices[0];
    const double signed_vol = e.determinant() / factorial(n_);
    if (!(std::abs(signed_vol) > 0.0)) throw MeshError("degenerate cell");
    volume_ = std::abs(signed_vol);
    orientation_ = signed_vol > 0 ? 1 : -1;
    centroid_ = Vec::Zero(n_);
    for (const auto& v : vertices) centroid_ += v;
    centroid_ /= (n_ + 1);
    // [lambda] = A^{-1} [x; 1]
    const Mat ainv = a.inverse();
    bary_grad_ = ainv.leftCols(n_);
    bary_offset_ = ainv.col(n_);

    // Moments: x^e as a barycentric polynomial, built degree by degree.
    const int ncode = pow_base(n_);
    moments_.assign(ncode, std::nan(""));
    std::vector<LamPoly> lam(ncode);
    lam[0][0] = 1.0;
    auto integrate = [&](const LamPoly& p) {
        double s = 0.0;
        for (const auto& [code, c] : p) {
            const auto ex = mono_exps(code, n_ + 1);
            double num = factorial(n_);
            int tot = 0;
            for (int x : ex) {
                num *= factorial(x);
                tot += x;
            }
            s += c * num / factorial(tot + n_);
        }
        return s * volume_;
    };
    moments_[0] = volume_;
    for (int deg = 1; deg <= kMomentDegree; ++deg)
        for (int code = 1; code < ncode; ++code) {
            if (mono_degree(code, n_) != deg) continue;
            auto ex = mono_exps(code, n_);
            int axis = 0;
            while (ex[axis] == 0) ++axis;
            --ex[axis];
            const LamPoly& prev = lam[mono_code(ex)];
            LamPoly next;
            for (const auto& [lc, c] : prev)
                for (int i = 0; i <= n_; ++i) {
                    const double xi = vertices_[i](axis);
                    if (xi == 0.0) continue;
                    next[lc + pow_base(i)] += c * xi;
                }
            moments_[code] = integrate(next);
            lam[code] = std::move(next);
        }
}

double CellGeometry::diameter() const {
    double h = 0.0;
    for (size_t i = 0; i < vertices_.size(); ++i)
        for (size_t j = i + 1; j < vertices_.size(); ++j) h = std::max(h, (vertices_[i] - vertices_[j]).norm());
    return h;
}

PolyForm::PolyForm(int n, int k) : n_(n), k_(k) {
    if (n < 0 || n > kMaxFormDim) throw InvalidParameter("form dimension out of range");
    if (k < 0 || k > n) throw InvalidParameter("form degree out of range");
}

PolyForm PolyForm::scalar(int n, double c) {
    PolyForm p(n, 0);
    p.add_term(0, 0, c);
    return p;
}

PolyForm PolyForm::coordinate(int n, int axis, double shift) {
    PolyForm p(n, 0);
    p.add_term(pow_base(axis), 0, 1.0);
    p.add_term(0, 0, -shift);
    return p;
}

PolyForm PolyForm::dx(int n, const MultiIndex& axes, double c) {
    PolyForm p(n, static_cast<int>(axes.size()));
    for (size_t i = 1; i < axes.size(); ++i)
        if (axes[i] <= axes[i - 1]) throw InvalidParameter("multi-index must be strictly increasing");
    p.add_term(0, axes_mask(axes), c);
    return p;
}

PolyForm PolyForm::barycentric(const CellGeometry& cell, int i) {
    const int n = cell.dim();
    PolyForm p(n, 0);
    p.add_term(0, 0, cell.bary_offset()(i));
    for (int j = 0; j < n; ++j) p.add_term(pow_base(j), 0, cell.bary_grad()(i, j));
    return p;
}

int PolyForm::degree() const {
    int d = 0;
    for (const auto& [key, c] : terms_) d = std::max(d, mono_degree(key.first, n_));
    return d;
}

void PolyForm::add_term(int code, int mask, double c) {
    if (c == 0.0) return;
    if (popcount(mask) != k_) throw DegreeMismatch("term degree differs from form degree");
    if (mono_degree(code, n_) > kMaxPolyDegree) throw DegreeOverflow("polynomial degree exceeds the cap");
    auto it = terms_.find({code, mask});
    if (it == terms_.end()) {
        terms_.emplace(Key{code, mask}, c);
        return;
    }
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
}

void PolyForm::add_term(const std::vector<int>& exps, const MultiIndex& axes, double c) {
    add_term(mono_code(exps), axes_mask(axes), c);
}

PolyForm& PolyForm::operator+=(const PolyForm& o) {
    if (terms_.empty() && n_ == 0 && k_ == 0) {
        n_ = o.n_;
        k_ = o.k_;
    }
    if (o.n_ != n_ || o.k_ != k_) throw DegreeMismatch("adding forms of different degree");
    for (const auto& [key, c] : o.terms_) add_term(key.first, key.second, c);
    return *this;
}

PolyForm& PolyForm::operator-=(const PolyForm& o) { return *this += -o; }

PolyForm& PolyForm::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [key, c] : terms_) c *= s;
    return *this;
}

double PolyForm::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [key, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

Vec PolyForm::evaluate(const Vec& x) const {
    const auto idx = multi_indices(n_, k_);
    Vec out = Vec::Zero(static_cast<Eigen::Index>(idx.size()));
    for (const auto& [key, c] : terms_) {
        const auto ex = mono_exps(key.first, n_);
        double v = c;
        for (int i = 0; i < n_; ++i) v *= std::pow(x(i), ex[i]);
        for (size_t a = 0; a < idx.size(); ++a)
            if (axes_mask(idx[a]) == key.second) out(a) += v;
    }
    return out;
}

std::string PolyForm::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [key, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << c;
        const auto ex = mono_exps(key.first, n_);
        for (int i = 0; i < n_; ++i)
            if (ex[i]) os << "*x" << (i + 1) << (ex[i] > 1 ? "^" + std::to_string(ex[i]) : "");
        const auto ax = mask_axes(key.second);
        for (size_t i = 0; i < ax.size(); ++i) os << (i ? "^" : " ") << "dx" << (ax[i] + 1);
    }
    return os.str();
}

PolyForm wedge(const PolyForm& a, const PolyForm& b) {
    if (a.n() != b.n()) throw DegreeMismatch("wedge of forms in different dimensions");
    PolyForm out(a.n(), a.k() + b.k());
    for (const auto& [ka, ca] : a.terms())
        for (const auto& [kb, cb] : b.terms()) {
            const int s = wedge_sign(ka.second, kb.second);
            if (s == 0) continue;
            out.add_term(ka.first + kb.first, ka.second | kb.second, s * ca * cb);
        }
    return out;
}

PolyForm exterior_derivative(const PolyForm& w) {
    const int n = w.n();
    if (w.k() >= n) throw DegreeOverflow("d of a top-degree form");
    PolyForm out(n, w.k() + 1);
    for (const auto& [key, c] : w.terms()) {
        const auto ex = mono_exps(key.first, n);
        for (int j = 0; j < n; ++j) {
            if (ex[j] == 0 || (key.second & (1 << j))) continue;
            const int s = wedge_sign(1 << j, key.second);
            out.add_term(key.first - pow_base(j), key.second | (1 << j), s * ex[j] * c);
        }
    }
    return out;
}

PolyForm hodge_star(const PolyForm& w) {
    const int n = w.n();
    const int full = (1 << n) - 1;
    PolyForm out(n, n - w.k());
    for (const auto& [key, c] : w.terms()) {
        const int comp = full & ~key.second;
        out.add_term(key.first, comp, wedge_sign(key.second, comp) * c);
    }
    return out;
}

PolyForm codifferential(const PolyForm& w) {
    if (w.k() == 0) throw DegreeUnderflow("codifferential of a 0-form");
    const int n = w.n();
    const int s = ((n * (w.k() + 1) + 1) % 2) ? -1 : 1;
    return hodge_star(exterior_derivative(hodge_star(w))) * static_cast<double>(s);
}

PolyForm koszul(const PolyForm& w) { return koszul(w, Vec::Zero(w.n())); }

PolyForm koszul(const PolyForm& w, const Vec& center) {
    if (w.k() == 0) throw DegreeUnderflow("Koszul operator of a 0-form");
    const int n = w.n();
    PolyForm out(n, w.k() - 1);
    for (const auto& [key, c] : w.terms()) {
        const auto axes = mask_axes(key.second);
        for (size_t j = 0; j < axes.size(); ++j) {
            const double s = (j % 2 == 0) ? 1.0 : -1.0;
            const int rest = key.second & ~(1 << axes[j]);
            out.add_term(key.first + pow_base(axes[j]), rest, s * c);
            out.add_term(key.first, rest, -s * c * center(axes[j]));
        }
    }
    return out;
}

double l2_inner(const PolyForm& a, const PolyForm& b, const CellGeometry& cell) {
    if (a.k() != b.k()) throw DegreeMismatch("inner product of forms of different degree");
    if (a.n() != b.n() || a.n() != cell.dim()) throw DegreeMismatch("form dimension differs from cell");
    double s = 0.0;
    for (const auto& [ka, ca] : a.terms())
        for (const auto& [kb, cb] : b.terms())
            if (ka.second == kb.second) s += ca * cb * cell.monomial_integral(ka.first + kb.first);
    return s;
}

PolyForm trace_on(const PolyForm& w, const std::vector<Vec>& sub) {
    const int n = w.n();
    const int m = static_cast<int>(sub.size()) - 1;
    if (m < w.k()) throw DegreeOverflow("trace onto a sub-simplex of lower dimension than the form degree");
    Mat jac(n, m);
    for (int j = 0; j < m; ++j) jac.col(j) = sub[j + 1] - sub[0];
    // x_i pulled back as affine scalar in t.
    std::vector<PolyForm> xs;
    for (int i = 0; i < n; ++i) {
        PolyForm p(m, 0);
        p.add_term(0, 0, sub[0](i));
        for (int j = 0; j < m; ++j) p.add_term(pow_base(j), 0, jac(i, j));
        xs.push_back(p);
    }
    PolyForm out(m, w.k());
    const auto targets = multi_indices(m, w.k());
    for (const auto& [key, c] : w.terms()) {
        const auto ex = mono_exps(key.first, n);
        PolyForm poly = PolyForm::scalar(m, c);
        for (int i = 0; i < n; ++i)
            for (int e = 0; e < ex[i]; ++e) poly = wedge(poly, xs[i]);
        const auto axes = mask_axes(key.second);
        for (const auto& b : targets) {
            Mat minor(axes.size(), b.size());
            for (size_t r = 0; r < axes.size(); ++r)
                for (size_t q = 0; q < b.size(); ++q) minor(r, q) = jac(axes[r], b[q]);
            const double det = axes.empty() ? 1.0 : minor.determinant();
            if (det == 0.0) continue;
            for (const auto& [pk, pc] : poly.terms()) out.add_term(pk.first, axes_mask(b), pc * det);
        }
    }
    return out;
}

double integrate_reference(const PolyForm& top) {
    const int m = top.n();
    if (top.k() != m) throw DegreeMismatch("reference integration needs a top-degree form");
    double s = 0.0;
    for (const auto& [key, c] : top.terms()) {
        const auto ex = mono_exps(key.first, m);
        double num = 1.0;
        int tot = 0;
        for (int x : ex) {
            num *= factorial(x);
            tot += x;
        }
        s += c * num / factorial(tot + m);
    }
    return s;
}

double integrate_on(const PolyForm& w, const std::vector<Vec>& sub) {
    return integrate_reference(trace_on(w, sub));
}

}  // namespace padfeec
