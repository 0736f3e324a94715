#include "padfeec/quadrature.hpp"

#include "padfeec/errors.hpp"

#include <cmath>

namespace padfeec {

namespace {

double factorial(int m) {
    double r = 1.0;
    for (int i = 2; i <= m; ++i) r *= i;
    return r;
}

void compositions(int parts, int total, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == parts - 1) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int v = total; v >= 0; --v) {
        cur.push_back(v);
        compositions(parts, total - v, cur, out);
        cur.pop_back();
    }
}

}  // namespace

QuadRule simplex_rule(int n, int degree) {
    if (n < 1 || degree < 0) throw InvalidParameter("bad quadrature request");
    const int s = degree / 2;
    const int d = 2 * s + 1;
    QuadRule rule;
    double total = 0.0;
    for (int i = 0; i <= s; ++i) {
        const double w = ((i % 2) ? -1.0 : 1.0) * std::pow(2.0, -2 * s) * std::pow(d + n - 2 * i, d) /
                         (factorial(i) * factorial(d + n - i));
        std::vector<std::vector<int>> betas;
        std::vector<int> cur;
        compositions(n + 1, s - i, cur, betas);
        for (const auto& b : betas) {
            Vec lam(n + 1);
            for (int j = 0; j <= n; ++j) lam(j) = (2.0 * b[j] + 1.0) / (d + n - 2 * i);
            rule.bary.push_back(lam);
            rule.weights.push_back(w);
            total += w;
        }
    }
    for (double& w : rule.weights) w /= total;
    return rule;
}

double quad_inner(const FormField& f, const PolyForm& g, const CellGeometry& cell, int degree) {
    const QuadRule rule = simplex_rule(cell.dim(), degree);
    double s = 0.0;
    for (size_t q = 0; q < rule.weights.size(); ++q) {
        Vec x = Vec::Zero(cell.dim());
        for (int j = 0; j <= cell.dim(); ++j) x += rule.bary[q](j) * cell.vertices()[j];
        s += rule.weights[q] * f(x).dot(g.evaluate(x));
    }
    return s * cell.volume();
}

double quad_inner(const PolyForm& f, const PolyForm& g, const CellGeometry& cell, int degree) {
    return quad_inner([&](const Vec& x) { return f.evaluate(x); }, g, cell, degree);
}

}  // namespace padfeec
