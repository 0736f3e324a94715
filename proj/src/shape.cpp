#include "padfeec/shape.hpp"

#include "padfeec/errors.hpp"
#include "padfeec/mesh.hpp"

#include <cmath>

namespace padfeec {

std::string tag_name(LocalTag t) {
    switch (t) {
        case LocalTag::P1minus: return "P1minus";
        case LocalTag::P1starminus: return "P1starminus";
        case LocalTag::P0: return "P0";
        case LocalTag::Mixed: return "Mixed";
        case LocalTag::RT: return "RT";
        case LocalTag::RTperp: return "RTperp";
        case LocalTag::P1: return "P1";
        case LocalTag::CR: return "CR";
        case LocalTag::P2: return "P2";
        case LocalTag::P1vec: return "P1vec";
        case LocalTag::P2plus: return "P2plus";
        case LocalTag::P1plus: return "P1plus";
    }
    return "?";
}

PolyForm apply_op(DiffOp op, const PolyForm& w) {
    return op == DiffOp::d ? exterior_derivative(w) : codifferential(w);
}

Mat form_gram(const std::vector<PolyForm>& a, const std::vector<PolyForm>& b, const CellGeometry& cell) {
    Mat g(a.size(), b.size());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) g(i, j) = l2_inner(a[i], b[j], cell);
    return g;
}

std::vector<PolyForm> orthonormal_forms(const std::vector<PolyForm>& forms, const CellGeometry& cell,
                                        double drop_tol) {
    std::vector<PolyForm> out;
    for (const auto& f : forms) {
        const double n0 = std::sqrt(std::max(0.0, l2_norm2(f, cell)));
        if (n0 == 0.0) continue;
        PolyForm v = f;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : out) v -= q * l2_inner(q, v, cell);
        const double nv = std::sqrt(std::max(0.0, l2_norm2(v, cell)));
        if (nv <= drop_tol * n0) continue;
        out.push_back(v * (1.0 / nv));
    }
    return out;
}

Mat coordinates_in(const LocalSpace& target, const std::vector<PolyForm>& forms, double* residual) {
    const Mat g = form_gram(target.basis, target.basis, target.cell);
    const Mat rhs = form_gram(target.basis, forms, target.cell);
    Mat c = g.ldlt().solve(rhs);
    if (residual) {
        double worst = 0.0;
        for (size_t j = 0; j < forms.size(); ++j) {
            PolyForm r = forms[j];
            for (int i = 0; i < target.dim(); ++i) r -= target.basis[i] * c(i, j);
            const double nf = std::sqrt(std::max(0.0, l2_norm2(forms[j], target.cell)));
            const double nr = std::sqrt(std::max(0.0, l2_norm2(r, target.cell)));
            worst = std::max(worst, nf > 0 ? nr / nf : nr);
        }
        *residual = worst;
    }
    return c;
}

namespace {

std::vector<PolyForm> p0_forms(const CellGeometry& cell, int k) {
    std::vector<PolyForm> out;
    const double s = 1.0 / std::sqrt(cell.volume());
    for (const auto& a : multi_indices(cell.dim(), k)) out.push_back(PolyForm::dx(cell.dim(), a, s));
    return out;
}

std::vector<PolyForm> koszul_block(const CellGeometry& cell, int k) {
    std::vector<PolyForm> raw;
    if (k + 1 <= cell.dim())
        for (const auto& a : multi_indices(cell.dim(), k + 1)) raw.push_back(koszul(PolyForm::dx(cell.dim(), a), cell));
    return orthonormal_forms(raw, cell);
}

std::vector<PolyForm> star_koszul_star_block(const CellGeometry& cell, int k) {
    std::vector<PolyForm> raw;
    if (k >= 1)
        for (const auto& a : multi_indices(cell.dim(), k - 1))
            raw.push_back(hodge_star(koszul(hodge_star(PolyForm::dx(cell.dim(), a)), cell)));
    return orthonormal_forms(raw, cell);
}

}  // namespace

LocalSpace whitney_local(const CellGeometry& cell, int k, Variant v) {
    const int n = cell.dim();
    if (k < 0 || k > n) throw InvalidParameter("form degree out of range");
    LocalSpace s;
    s.cell = cell;
    s.k = k;
    if (v == Variant::primal) {
        s.tag = LocalTag::P1minus;
        s.basis = p0_forms(cell, k);
        for (auto& f : koszul_block(cell, k)) s.basis.push_back(f);
    } else {
        // star of the primal space of complementary degree
        s.tag = LocalTag::P1starminus;
        const LocalSpace p = whitney_local(cell, n - k, Variant::primal);
        for (const auto& f : p.basis) s.basis.push_back(hodge_star(f));
    }
    return s;
}

LocalSpace p0_local(const CellGeometry& cell, int k) {
    LocalSpace s;
    s.cell = cell;
    s.k = k;
    s.tag = LocalTag::P0;
    s.basis = p0_forms(cell, k);
    return s;
}

LocalSpace mixed_local(const CellGeometry& cell, int k) {
    LocalSpace s;
    s.cell = cell;
    s.k = k;
    s.tag = LocalTag::Mixed;
    std::vector<PolyForm> all = p0_forms(cell, k);
    for (auto& f : koszul_block(cell, k)) all.push_back(f);
    for (auto& f : star_koszul_star_block(cell, k)) all.push_back(f);
    s.basis = orthonormal_forms(all, cell);
    return s;
}

PolyForm whitney_form(const CellGeometry& cell, const std::vector<int>& lv) {
    const int n = cell.dim();
    const int k = static_cast<int>(lv.size()) - 1;
    std::vector<PolyForm> lam, dlam;
    for (int i : lv) {
        lam.push_back(PolyForm::barycentric(cell, i));
        dlam.push_back(exterior_derivative(lam.back()));
    }
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    PolyForm out(n, k);
    for (int j = 0; j <= k; ++j) {
        PolyForm term = lam[j];
        for (int i = 0; i <= k; ++i)
            if (i != j) term = wedge(term, dlam[i]);
        out += term * ((j % 2 ? -1.0 : 1.0) * fact);
    }
    return out;
}

RangeKernel local_range_kernel(const LocalSpace& space, DiffOp op, const LocalSpace& target) {
    const int n = space.cell.dim();
    if (op == DiffOp::d && space.k >= n) throw DegreeOverflow("d not applicable at k = n");
    if (op == DiffOp::delta && space.k == 0) throw DegreeUnderflow("delta not applicable at k = 0");
    std::vector<PolyForm> img;
    for (const auto& f : space.basis) img.push_back(apply_op(op, f));
    RangeKernel rk;
    const Mat c = coordinates_in(target, img, &rk.residual);
    const Metric gt(form_gram(target.basis, target.basis, target.cell));
    const Metric gs(form_gram(space.basis, space.basis, space.cell));
    rk.range = range_of(c, Subspace::full(space.dim()), gt);
    rk.kernel = kernel_of(c, Subspace::full(space.dim()), gs, gt);
    return rk;
}

RangeKernel local_range_kernel(const LocalSpace& space, DiffOp op) {
    const int k = space.k + (op == DiffOp::d ? 1 : -1);
    const Variant v = space.tag == LocalTag::P1starminus ? Variant::dual : Variant::primal;
    return local_range_kernel(space, op, whitney_local(space.cell, k, v));
}

Mat PairData::gram_p() const {
    if (ax_identity) return Mat::Identity(dim_p(), dim_p());
    return ax.transpose() * ax;
}

Mat PairData::gram_q() const {
    if (ay_identity) return Mat::Identity(dim_q(), dim_q());
    return ay.transpose() * ay;
}

Mat PairData::pairing() const {
    const Mat left = ax_identity ? ts : Mat(ax.transpose() * ts);
    const Mat right = ay_identity ? Mat(t.transpose()) : Mat(t.transpose() * ay);
    return left - right;
}

LocalPair make_local_pair(LocalSpace primal, LocalSpace dual, FormOp t, FormOp tstar) {
    LocalPair lp;
    const CellGeometry& cell = primal.cell;
    std::vector<PolyForm> tp, tq;
    for (const auto& f : primal.basis) tp.push_back(t(f));
    for (const auto& f : dual.basis) tq.push_back(tstar(f));
    std::vector<PolyForm> xs = primal.basis, ys = dual.basis;
    xs.insert(xs.end(), tq.begin(), tq.end());
    ys.insert(ys.end(), tp.begin(), tp.end());
    LocalSpace x{cell, primal.k, primal.tag, orthonormal_forms(xs, cell)};
    LocalSpace y{cell, dual.k, dual.tag, orthonormal_forms(ys, cell)};
    lp.data.ax = form_gram(x.basis, primal.basis, cell);
    lp.data.ts = form_gram(x.basis, tq, cell);
    lp.data.ay = form_gram(y.basis, dual.basis, cell);
    lp.data.t = form_gram(y.basis, tp, cell);
    lp.primal = std::move(primal);
    lp.dual = std::move(dual);
    lp.op = std::move(t);
    lp.adj = std::move(tstar);
    return lp;
}

LocalPair whitney_pair(const CellGeometry& cell, int k) {
    return make_local_pair(whitney_local(cell, k, Variant::primal), whitney_local(cell, k + 1, Variant::dual),
                           exterior_derivative, codifferential);
}

double twisted_infsup(const Mat& a, const Mat& b, double tol) {
    const Metric id = Metric::identity(static_cast<int>(a.rows()));
    const Subspace qa = orthonormalize(a, id, tol);
    const Subspace qb = orthonormalize(b, id, tol);
    if (qa.dim() == 0) return 1.0;
    if (qb.dim() == 0) return 0.0;
    return infsup(qa, qb, id, tol);
}

LocalDecomposition decompose(const PairData& pd, const Tolerances& tol) {
    LocalDecomposition d;
    const Metric mp(pd.gram_p());
    const Metric mq(pd.gram_q());
    const Metric mx = Metric::identity(pd.dim_x());
    const Metric my = Metric::identity(pd.dim_y());
    const Mat b = pd.pairing();

    auto side = [&](const Mat& pairing_t, const Mat& op, const Metric& m, const Metric& mtarget,
                    Subspace& s0, Subspace& ring0, Subspace& perp0, Subspace& sb, Subspace& ringb,
                    Subspace& perpb) {
        const int dim = static_cast<int>(op.cols());
        s0 = orthonormalize(nullspace(pairing_t, tol.rank).basis, m, tol.rank);
        if (pairing_t.rows() == 0) s0 = orthonormalize(Mat::Identity(dim, dim), m, tol.rank);
        ring0 = kernel_of(op, s0, m, mtarget, tol.rank);
        perp0 = gram_complement(ring0, s0, m, tol);
        Mat c(dim, ring0.dim() + s0.dim());
        c << m.gram() * ring0.basis, op.transpose() * op * s0.basis;
        sb = orthonormalize(c.cols() ? nullspace(c.transpose(), tol.rank).basis : Mat(Mat::Identity(dim, dim)), m,
                            tol.rank);
        ringb = kernel_of(op, sb, m, mtarget, tol.rank);
        perpb = gram_complement(ringb, sb, m, tol);
    };
    side(b.transpose(), pd.t, mp, my, d.P0, d.ringP0, d.P0perp, d.PB, d.ringPB, d.PBperp);
    side(b, pd.ts, mq, mx, d.Q0, d.ringQ0, d.Q0perp, d.QB, d.ringQB, d.QBperp);

    d.alpha = twisted_infsup(pd.to_x(d.ringPB.basis), pd.ts * d.QB.basis, tol.rank);
    d.beta = twisted_infsup(pd.to_y(d.ringQB.basis), pd.t * d.PB.basis, tol.rank);
    return d;
}

LocalDecomposition decompose_local(const LocalPair& pair, const Tolerances& tol) {
    return decompose(pair.data, tol);
}

}  // namespace padfeec
