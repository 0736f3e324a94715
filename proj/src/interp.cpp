#include "padfeec/interp.hpp"

#include "padfeec/errors.hpp"
#include "padfeec/gallery.hpp"
#include "padfeec/parallel.hpp"

#include <cmath>
#include <random>

namespace padfeec {

namespace {

std::vector<PolyForm> combos(const std::vector<PolyForm>& basis, const Mat& coeffs, int n, int k) {
    std::vector<PolyForm> out;
    for (Eigen::Index j = 0; j < coeffs.cols(); ++j) {
        PolyForm f(n, k);
        for (Eigen::Index i = 0; i < coeffs.rows(); ++i)
            if (coeffs(i, j) != 0.0) f += basis[i] * coeffs(i, j);
        out.push_back(f);
    }
    return out;
}

void factor(LocalInterpolator& s, const Tolerances& tol) {
    const int dim = s.primal.dim();
    const int rows = static_cast<int>(s.qb.size() + s.ring.size() + s.perp.size());
    if (rows != dim)
        throw AssumptionViolation(-1, "interpolation system is " + std::to_string(rows) + " x " +
                                          std::to_string(dim));
    const CellGeometry& cell = s.primal.cell;
    s.system.resize(dim, dim);
    std::vector<PolyForm> tp;
    if (!s.perp.empty())
        for (const auto& p : s.primal.basis) tp.push_back(s.op(p));
    for (int i = 0; i < dim; ++i) {
        const PolyForm& p = s.primal.basis[i];
        int r = 0;
        if (!s.qb.empty()) {
            const PolyForm tpi = s.op(p);
            for (const auto& q : s.qb) s.system(r++, i) = l2_inner(p, s.adj(q), cell) - l2_inner(tpi, q, cell);
        }
        for (const auto& w : s.ring) s.system(r++, i) = l2_inner(p, w, cell);
        for (const auto& w : s.perp) s.system(r++, i) = l2_inner(tp[i], s.op(w), cell);
    }
    const std::vector<double> sv = singular_values(s.system);
    if (sv.empty() || sv.back() <= tol.rank * sv.front())
        throw AssumptionViolation(-1, "interpolation system is singular");
    s.lu = Eigen::PartialPivLU<Mat>(s.system);
}

}  // namespace

LocalInterpolator make_interpolator(const LocalPair& pair, const Tolerances& tol) {
    LocalInterpolator s;
    s.primal = pair.primal;
    s.dual = pair.dual;
    s.op = pair.op;
    s.adj = pair.adj;
    s.dec = decompose(pair.data, tol);
    const int n = s.primal.cell.dim();
    const int kp = s.primal.k, kq = s.dual.k;
    s.qb = combos(s.dual.basis, s.dec.QB.basis, n, kq);
    s.ring = combos(s.primal.basis, s.dec.ringP0.basis, n, kp);
    s.perp = combos(s.primal.basis, s.dec.P0perp.basis, n, kp);
    factor(s, tol);
    return s;
}

LocalInterpolator whitney_interpolator(const CellGeometry& cell, int k, const Tolerances& tol) {
    const int n = cell.dim();
    if (k < 0 || k > n) throw DegreeOverflow("interpolation degree out of [0, n]");
    if (k < n) return make_interpolator(whitney_pair(cell, k), tol);
    LocalInterpolator s;
    s.primal = whitney_local(cell, n, Variant::primal);
    s.op = exterior_derivative;
    s.adj = codifferential;
    s.ring = s.primal.basis;
    factor(s, tol);
    return s;
}

Vec interpolate_local(const LocalInterpolator& s, const PolyForm& w) {
    const CellGeometry& cell = s.primal.cell;
    Vec rhs(s.primal.dim());
    int r = 0;
    if (!s.qb.empty()) {
        const PolyForm tw = s.op(w);
        for (const auto& q : s.qb) rhs(r++) = l2_inner(w, s.adj(q), cell) - l2_inner(tw, q, cell);
    }
    for (const auto& f : s.ring) rhs(r++) = l2_inner(w, f, cell);
    if (!s.perp.empty()) {
        const PolyForm tw = s.op(w);
        for (const auto& f : s.perp) rhs(r++) = l2_inner(tw, s.op(f), cell);
    }
    return s.lu.solve(rhs);
}

Vec interpolate_local(const LocalInterpolator& s, const FormField& w, const FormField& op_w) {
    const CellGeometry& cell = s.primal.cell;
    Vec rhs(s.primal.dim());
    int r = 0;
    for (const auto& q : s.qb) rhs(r++) = quad_inner(w, s.adj(q), cell) - quad_inner(op_w, q, cell);
    for (const auto& f : s.ring) rhs(r++) = quad_inner(w, f, cell);
    for (const auto& f : s.perp) rhs(r++) = quad_inner(op_w, s.op(f), cell);
    return s.lu.solve(rhs);
}

PolyForm local_form(const LocalSpace& space, const Vec& coeffs) {
    PolyForm f(space.cell.dim(), space.k);
    for (int i = 0; i < space.dim(); ++i) f += space.basis[i] * coeffs(i);
    return f;
}

Vec cr_closed_form(const CellGeometry& cell, const PolyForm& v) {
    if (cell.dim() != 2 || v.k() != 0) throw Unsupported("closed form is for scalar fields on triangles");
    const PolyForm dt = PolyForm::dx(1, {0});
    Vec c(3);
    for (int i = 0; i < 3; ++i) {
        std::vector<Vec> edge;
        for (int j = 0; j < 3; ++j)
            if (j != i) edge.push_back(cell.vertices()[j]);
        c(i) = edge_length(cell, i) * integrate_reference(wedge(trace_on(v, edge), dt));
    }
    return c;
}

Vec interpolate_global(std::shared_ptr<const Mesh> mesh, int k, const CellField& w, const Tolerances& tol) {
    const LayoutPtr layout = make_layout(mesh, k, LocalFamily::primal);
    Vec out = Vec::Zero(layout->dim);
    parallel_for(mesh->num_cells(), [&](int c) {
        try {
            const LocalInterpolator s = whitney_interpolator(layout->local[c].cell, k, tol);
            out.segment(layout->offset[c], layout->local_dim(c)) = interpolate_local(s, w(c));
        } catch (const AssumptionViolation& e) {
            throw AssumptionViolation(c, e.what());
        }
    });
    return out;
}

double constraint_residual(const ConstraintSet& c, const Vec& v) {
    if (c.rows.rows() == 0) return 0.0;
    const double scale = std::max(1e-300, v.norm());
    return (c.rows * v).cwiseAbs().maxCoeff() / scale;
}

double commute_check(std::shared_ptr<const Mesh> mesh, int k, const CellField& w, const Tolerances& tol) {
    const int n = mesh->dim();
    if (k < 0 || k > n - 1) throw DegreeOverflow("commutation needs 0 <= k <= n-1");
    const LayoutPtr lk = make_layout(mesh, k, LocalFamily::primal);
    const LayoutPtr lk1 = make_layout(mesh, k + 1, LocalFamily::primal);
    const Vec a = interpolate_global(mesh, k, w, tol);
    const Vec b = interpolate_global(
        mesh, k + 1, [&](int c) { return exterior_derivative(w(c)); }, tol);
    return (broken_op(*lk, DiffOp::d, *lk1) * a - b).norm();
}

double gamma_local(const PairData& pd, const LocalDecomposition& dec, const Tolerances& tol) {
    if (dec.PB.dim() == 0) return 1.0;
    if (dec.QB.dim() < dec.PB.dim()) return 0.0;
    const Mat gp = pd.gram_p() + pd.t.transpose() * pd.t;
    const Mat gq = pd.gram_q() + pd.ts.transpose() * pd.ts;
    const Subspace u = orthonormalize(dec.PB.basis, Metric(gp), tol.rank);
    const Subspace v = orthonormalize(dec.QB.basis, Metric(gq), tol.rank);
    const Mat m = u.basis.transpose() * pd.pairing() * v.basis;
    const std::vector<double> sv = singular_values(m);
    return sv.size() < static_cast<std::size_t>(u.dim()) ? 0.0 : sv[u.dim() - 1];
}

StabilityReport stability_report(std::shared_ptr<const Mesh> mesh, int k, const std::vector<CellField>& samples,
                                 const Tolerances& tol) {
    const int n = mesh->dim();
    if (k < 0 || k > n - 1) throw DegreeOverflow("stability needs 0 <= k <= n-1");
    const int nc = mesh->num_cells();
    std::vector<LocalInterpolator> interps(nc);
    std::vector<Mat> tmats(nc);
    std::vector<double> beta(nc), gamma(nc), rho(nc);
    parallel_for(nc, [&](int c) {
        const CellGeometry cell = cell_geometry(*mesh, c);
        const LocalPair lp = whitney_pair(cell, k);
        interps[c] = make_interpolator(lp, tol);
        tmats[c] = lp.data.t;
        beta[c] = interps[c].dec.beta;
        gamma[c] = gamma_local(lp.data, interps[c].dec, tol);
        rho[c] = icr_of(lp.data.t, interps[c].dec.P0, Metric(lp.data.gram_p()),
                        Metric::identity(lp.data.dim_y()), tol);
    });
    StabilityReport r;
    r.beta = *std::min_element(beta.begin(), beta.end());
    r.gamma = *std::min_element(gamma.begin(), gamma.end());
    r.rho = *std::max_element(rho.begin(), rho.end());
    r.energy_bound = 1.0 + 1.0 / r.beta;
    r.full_bound = 2.0 + r.rho + 1.0 / r.gamma + 1.0 / r.beta;

    for (const auto& w : samples) {
        double di = 0.0, dw = 0.0, ii = 0.0, ww = 0.0;
        for (int c = 0; c < nc; ++c) {
            const CellGeometry& cell = interps[c].primal.cell;
            const PolyForm f = w(c);
            const Vec x = interpolate_local(interps[c], f);
            // local bases are orthonormal, so coefficient norms are L2 norms
            di += (tmats[c] * x).squaredNorm();
            ii += x.squaredNorm();
            const double d2 = l2_norm2(exterior_derivative(f), cell);
            dw += d2;
            ww += l2_norm2(f, cell);
        }
        if (dw > 1e-28) r.energy_ratio = std::max(r.energy_ratio, std::sqrt(di / dw));
        if (ww + dw > 1e-28) r.full_ratio = std::max(r.full_ratio, std::sqrt((ii + di) / (ww + dw)));
    }
    const double slack = 1.0 + 1e-12;
    r.ok = r.energy_ratio <= r.energy_bound * slack && r.full_ratio <= r.full_bound * slack;
    return r;
}

PolyForm random_form(int n, int k, int degree, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PolyForm f(n, k);
    std::vector<int> e(n, 0);
    for (const auto& a : multi_indices(n, k)) {
        // all exponent vectors with total degree <= degree
        std::function<void(int, int)> rec = [&](int axis, int left) {
            if (axis == n) {
                f.add_term(e, a, u(rng));
                return;
            }
            for (int p = 0; p <= left; ++p) {
                e[axis] = p;
                rec(axis + 1, left - p);
            }
            e[axis] = 0;
        };
        rec(0, degree);
    }
    return f;
}

}  // namespace padfeec
