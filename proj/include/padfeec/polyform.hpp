#pragma once

#include "padfeec/linalg.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace padfeec {

// Polynomial degree cap on form coefficients. The cubic psi_B of the
// enriched spaces is the largest polynomial the kernel has to carry.
constexpr int kMaxPolyDegree = 3;
constexpr int kMaxFormDim = 4;

// Strictly increasing axis indices (0-based internally).
using MultiIndex = std::vector<int>;

// All MultiIndex of length k over n axes, lexicographic.
std::vector<MultiIndex> multi_indices(int n, int k);
int axes_mask(const MultiIndex& a);
MultiIndex mask_axes(int mask);

// Geometry of one n-simplex with exact monomial moments up to degree 6.
class CellGeometry {
public:
    CellGeometry() = default;
    explicit CellGeometry(const std::vector<Vec>& vertices);

    int dim() const { return n_; }
    double volume() const { return volume_; }  // unsigned
    int orientation() const { return orientation_; }
    const Vec& centroid() const { return centroid_; }
    const std::vector<Vec>& vertices() const { return vertices_; }
    // lambda_i(x) = grad_i . x + offset_i
    const Mat& bary_grad() const { return bary_grad_; }
    const Vec& bary_offset() const { return bary_offset_; }
    double diameter() const;
    // exact integral of x^e over the cell, |e| <= 6
    double monomial_integral(int code) const { return moments_.at(code); }

private:
    int n_ = 0;
    std::vector<Vec> vertices_;
    double volume_ = 0.0;
    int orientation_ = 1;
    Vec centroid_;
    Mat bary_grad_;
    Vec bary_offset_;
    std::vector<double> moments_;
};

// Exponent vectors are packed base 8, axis 0 in the lowest digit.
int mono_code(const std::vector<int>& exps);
std::vector<int> mono_exps(int code, int n);
int mono_degree(int code, int n);

class PolyForm {
public:
    using Key = std::pair<int, int>;  // (monomial code, axes mask)

    PolyForm() = default;
    PolyForm(int n, int k);

    static PolyForm scalar(int n, double c);
    static PolyForm coordinate(int n, int axis, double shift = 0.0);  // x_axis - shift
    static PolyForm dx(int n, const MultiIndex& axes, double c = 1.0);
    static PolyForm barycentric(const CellGeometry& cell, int i);

    int n() const { return n_; }
    int k() const { return k_; }
    int degree() const;
    const std::map<Key, double>& terms() const { return terms_; }

    void add_term(int code, int mask, double c);
    void add_term(const std::vector<int>& exps, const MultiIndex& axes, double c);

    PolyForm& operator+=(const PolyForm& o);
    PolyForm& operator-=(const PolyForm& o);
    PolyForm& operator*=(double s);
    friend PolyForm operator+(PolyForm a, const PolyForm& b) { return a += b; }
    friend PolyForm operator-(PolyForm a, const PolyForm& b) { return a -= b; }
    friend PolyForm operator*(PolyForm a, double s) { return a *= s; }
    friend PolyForm operator*(double s, PolyForm a) { return a *= s; }
    PolyForm operator-() const { return *this * -1.0; }

    bool is_zero() const { return terms_.empty(); }
    double max_abs_coeff() const;
    // Coefficient function of each dx^alpha at x, alpha in multi_indices(n,k) order.
    Vec evaluate(const Vec& x) const;
    std::string str() const;

private:
    int n_ = 0;
    int k_ = 0;
    std::map<Key, double> terms_;
};

PolyForm wedge(const PolyForm& a, const PolyForm& b);
PolyForm exterior_derivative(const PolyForm& w);
PolyForm hodge_star(const PolyForm& w);
// delta_k = (-1)^{n(k+1)+1} * d *, the formal L2 adjoint of d.
PolyForm codifferential(const PolyForm& w);
PolyForm koszul(const PolyForm& w);
PolyForm koszul(const PolyForm& w, const Vec& center);
inline PolyForm koszul(const PolyForm& w, const CellGeometry& cell) { return koszul(w, cell.centroid()); }

double l2_inner(const PolyForm& a, const PolyForm& b, const CellGeometry& cell);
inline double l2_norm2(const PolyForm& a, const CellGeometry& cell) { return l2_inner(a, a, cell); }

// Pullback to the sub-simplex p0..pm, parametrized x = p0 + sum t_j (p_j - p0).
PolyForm trace_on(const PolyForm& w, const std::vector<Vec>& subsimplex);
// Integral of a top-degree form given in those parameters over the reference simplex.
double integrate_reference(const PolyForm& top);
// Integral over the oriented sub-simplex of the trace of w (degree = its dimension).
double integrate_on(const PolyForm& w, const std::vector<Vec>& subsimplex);

}  // namespace padfeec
