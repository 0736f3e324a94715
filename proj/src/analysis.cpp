#include "padfeec/analysis.hpp"

#include "padfeec/errors.hpp"
#include "padfeec/parallel.hpp"
#include "memo.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>

namespace padfeec {

namespace {

int binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

Metric eye(int n) { return Metric::identity(n); }

Subspace orth(const Subspace& s, double tol) { return orthonormalize(s.basis, eye(s.ambient()), tol); }

Subspace complement(const Subspace& inner, const Subspace& outer, const Tolerances& tol) {
    return gram_complement(inner, outer, eye(outer.ambient()), tol);
}

// Inf-sup with convention 1 when both sides are trivial.
double slice_infsup(const Subspace& a, const Subspace& b, double tol) {
    if (a.dim() == 0 && b.dim() == 0) return 1.0;
    return twisted_infsup(a.basis, b.basis, tol);
}

int p0_dim(const Mesh& mesh, int k) { return binom(mesh.dim(), k) * mesh.num_cells(); }

AbcResult abc(std::shared_ptr<const Mesh> mesh, int k, BC bc, const Tolerances& tol) {
    return abcfes_by_constraints(std::move(mesh), k, bc, tol);
}

void set_pass(DecompositionReport& r, const Tolerances& tol) {
    r.pass = r.dims_match && r.orthogonality_residual < 1e-10 && r.identity_angle < tol.identity;
}

struct CellLadder {
    double alpha = 1.0, beta = 1.0, varpi = 1.0, kappa = 1.0, chi = 1.0, eps = 1.0;
    double icr_tilde = 0.0, icr_under = 0.0, icr_tilde_adj = 0.0, icr_under_adj = 0.0;
    int uM = 0, uN = 0, MB = 0, NB = 0;
    bool slices_iso = true;
};

std::vector<PolyForm> mapped(const std::vector<PolyForm>& fs, DiffOp op) {
    std::vector<PolyForm> out;
    out.reserve(fs.size());
    for (const auto& f : fs) out.push_back(apply_op(op, f));
    return out;
}

CellLadder cell_ladder(const CellGeometry& cell, int k, const Tolerances& tol) {
    const int n = cell.dim();
    CellLadder c;
    const LocalPair lp = whitney_pair(cell, k);
    const LocalDecomposition dec = decompose(lp.data, tol);
    c.alpha = dec.alpha;
    c.beta = dec.beta;
    c.uM = dec.P0.dim();
    c.uN = dec.Q0.dim();
    c.MB = dec.PB.dim();
    c.NB = dec.QB.dim();

    const PairData& pd = lp.data;
    const Metric mp(pd.gram_p()), mq(pd.gram_q());
    c.icr_tilde = icr_of(pd.t, Subspace::full(pd.dim_p()), mp, eye(pd.dim_y()), tol);
    c.icr_under = icr_of(pd.t, dec.P0, mp, eye(pd.dim_y()), tol);
    c.icr_tilde_adj = icr_of(pd.ts, Subspace::full(pd.dim_q()), mq, eye(pd.dim_x()), tol);
    c.icr_under_adj = icr_of(pd.ts, dec.Q0, mq, eye(pd.dim_x()), tol);

    // Next-level pair (S, Q) / (S*, Qd) living on the same Lambda^{k+1}.
    LocalSpace q;
    std::vector<PolyForm> qd;
    Subspace q0, qd0;
    const bool next = k + 1 <= n - 1;
    if (next) {
        const LocalPair lq = whitney_pair(cell, k + 1);
        const LocalDecomposition decq = decompose(lq.data, tol);
        c.varpi = decq.alpha;
        c.kappa = decq.beta;
        q = lq.primal;
        qd = lq.dual.basis;
        q0 = decq.P0;
        qd0 = decq.Q0;
    } else {
        q = whitney_local(cell, n, Variant::primal);
        q0 = Subspace::full(q.dim());
        qd0 = Subspace::zero(0);
    }

    // Joint orthonormal ambient of L2 Lambda^{k+1} on the cell.
    const std::vector<PolyForm> tp = mapped(lp.primal.basis, DiffOp::d);
    const std::vector<PolyForm> sq = mapped(qd, DiffOp::delta);
    std::vector<PolyForm> all = tp;
    all.insert(all.end(), lp.dual.basis.begin(), lp.dual.basis.end());
    all.insert(all.end(), q.basis.begin(), q.basis.end());
    all.insert(all.end(), sq.begin(), sq.end());
    const std::vector<PolyForm> joint = orthonormal_forms(all, cell);
    const int m = static_cast<int>(joint.size());
    auto coords = [&](const std::vector<PolyForm>& fs) {
        return fs.empty() ? Mat(m, 0) : form_gram(joint, fs, cell);
    };
    const Mat c_tp = coords(tp), c_pd = coords(lp.dual.basis), c_q = coords(q.basis), c_sq = coords(sq);

    // N(S, .) on Q (orthonormal) and N(T*, .) on the dual space.
    Subspace ker_q = q0, ker_q_full = Subspace::full(q.dim());
    if (next) {
        const Mat dq = coordinates_in(p0_local(cell, k + 2), mapped(q.basis, DiffOp::d));
        const Metric mqq = eye(q.dim()), mt = eye(static_cast<int>(dq.rows()));
        ker_q = kernel_of(dq, q0, mqq, mt, tol.rank);
        ker_q_full = kernel_of(dq, Subspace::full(q.dim()), mqq, mt, tol.rank);
    }
    const Mat dt = coordinates_in(p0_local(cell, k), mapped(lp.dual.basis, DiffOp::delta));
    const Metric mpd = eye(lp.dual.dim()), mt0 = eye(static_cast<int>(dt.rows()));
    const Subspace ker_t = kernel_of(dt, Subspace::full(lp.dual.dim()), mpd, mt0, tol.rank);
    const Subspace ker_t0 = kernel_of(dt, dec.Q0, mpd, mt0, tol.rank);

    auto in_joint = [&](const Mat& cm, const Subspace& s) {
        return orth(Subspace(Mat(cm * s.basis)), tol.rank);
    };
    const Subspace range_t = orth(Subspace(c_tp), tol.rank);
    const Subspace range_t0 = in_joint(c_tp, dec.P0);
    const Subspace range_s = orth(Subspace(c_sq), tol.rank);
    const Subspace range_s0 = c_sq.cols() ? in_joint(c_sq, qd0) : Subspace::zero(m);

    const Subspace H_tilde = complement(range_t, in_joint(c_q, ker_q_full), tol);
    const Subspace H_under = complement(range_t0, in_joint(c_q, ker_q), tol);
    const Subspace h_tilde = complement(range_s, in_joint(c_pd, ker_t), tol);
    const Subspace h_under = complement(range_s0, in_joint(c_pd, ker_t0), tol);
    c.chi = slice_infsup(H_tilde, h_under, tol.rank);
    c.eps = slice_infsup(H_under, h_tilde, tol.rank);
    c.slices_iso = H_tilde.dim() == h_under.dim() && H_under.dim() == h_tilde.dim();
    return c;
}

}  // namespace

bool BasePairReport::assumptions_ok() const {
    return std::all_of(assumptions.begin(), assumptions.end(), [](const auto& a) { return a.second; });
}

std::string BasePairReport::to_json() const {
    nlohmann::ordered_json j;
    j["uM_dim"] = uM_dim;
    j["uN_dim"] = uN_dim;
    j["MB_dim"] = MB_dim;
    j["NB_dim"] = NB_dim;
    j["alpha"] = alpha;
    j["beta"] = beta;
    j["kappa"] = kappa;
    j["varpi"] = varpi;
    j["chi"] = chi;
    j["eps"] = eps;
    j["icr_tilde"] = icr_tilde;
    j["icr_under"] = icr_under;
    j["icr_tilde_adj"] = icr_tilde_adj;
    j["icr_under_adj"] = icr_under_adj;
    nlohmann::ordered_json a;
    for (const auto& [name, ok] : assumptions) a[name] = ok;
    j["assumptions"] = a;
    return j.dump(2);
}

int DecompositionReport::dim(const std::string& key) const {
    for (const auto& [k, v] : dims)
        if (k == key) return v;
    return -1;
}

std::string DecompositionReport::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    nlohmann::ordered_json d;
    for (const auto& [k, v] : dims) d[k] = v;
    j["dims"] = d;
    j["orthogonality_residual"] = orthogonality_residual;
    j["identity_angle"] = identity_angle;
    j["dims_match"] = dims_match;
    j["pass"] = pass;
    if (!note.empty()) j["note"] = note;
    return j.dump(2);
}

Mat build_pairing(const GlobalSpace& primal, const GlobalSpace& dual) {
    DiffOp op;
    if (dual.k == primal.k + 1)
        op = DiffOp::d;
    else if (dual.k == primal.k - 1)
        op = DiffOp::delta;
    else
        throw DegreeMismatch("pairing needs degrees k and k+1 (or k-1), got " + std::to_string(primal.k) +
                             " and " + std::to_string(dual.k));
    const Mat b = broken_pairing(*primal.layout, op, *dual.layout);
    return primal.coords().transpose() * b * dual.coords();
}

BasePairReport base_pair_report(const PairData& pair, const Tolerances& tol) {
    BasePairReport r;
    const LocalDecomposition dec = decompose(pair, tol);
    r.uM_dim = dec.P0.dim();
    r.uN_dim = dec.Q0.dim();
    r.MB_dim = dec.PB.dim();
    r.NB_dim = dec.QB.dim();
    r.alpha = dec.alpha;
    r.beta = dec.beta;
    const Metric mp(pair.gram_p()), mq(pair.gram_q());
    r.icr_tilde = icr_of(pair.t, Subspace::full(pair.dim_p()), mp, eye(pair.dim_y()), tol);
    r.icr_under = icr_of(pair.t, dec.P0, mp, eye(pair.dim_y()), tol);
    r.icr_tilde_adj = icr_of(pair.ts, Subspace::full(pair.dim_q()), mq, eye(pair.dim_x()), tol);
    r.icr_under_adj = icr_of(pair.ts, dec.Q0, mq, eye(pair.dim_x()), tol);
    r.assumptions = {{"alpha_positive", r.alpha > tol.rank}, {"beta_positive", r.beta > tol.rank}};
    return r;
}

BasePairReport whitney_base_pair_report(const Mesh& mesh, int k, const Tolerances& tol) {
    const int n = mesh.dim();
    if (k < 0 || k > n - 1) throw DegreeOverflow("pair degree must lie in [0, n-1]");
    std::vector<CellLadder> cells(mesh.num_cells());
    parallel_for(mesh.num_cells(), [&](int c) { cells[c] = cell_ladder(cell_geometry(mesh, c), k, tol); });

    BasePairReport r;
    bool iso = true;
    for (const auto& c : cells) {
        r.alpha = std::min(r.alpha, c.alpha);
        r.beta = std::min(r.beta, c.beta);
        r.varpi = std::min(r.varpi, c.varpi);
        r.kappa = std::min(r.kappa, c.kappa);
        r.chi = std::min(r.chi, c.chi);
        r.eps = std::min(r.eps, c.eps);
        r.icr_tilde = std::max(r.icr_tilde, c.icr_tilde);
        r.icr_under = std::max(r.icr_under, c.icr_under);
        r.icr_tilde_adj = std::max(r.icr_tilde_adj, c.icr_tilde_adj);
        r.icr_under_adj = std::max(r.icr_under_adj, c.icr_under_adj);
        r.uM_dim += c.uM;
        r.uN_dim += c.uN;
        r.MB_dim += c.MB;
        r.NB_dim += c.NB;
        iso = iso && c.slices_iso;
    }
    const double t = tol.rank;
    r.assumptions = {{"alpha_positive", r.alpha > t}, {"beta_positive", r.beta > t},
                     {"varpi_positive", r.varpi > t}, {"kappa_positive", r.kappa > t},
                     {"slices_isomorphic", iso},      {"chi_positive", r.chi > t},
                     {"eps_positive", r.eps > t}};
    return r;
}

OperatorPair partial_adjoint_of(const Subspace& domain, const PairData& base, const Tolerances& tol) {
    if (domain.ambient() != base.dim_p()) throw InvalidParameter("domain does not live in the primal space");
    const Metric mp(base.gram_p()), mq(base.gram_q());
    // The annihilated part of the primal side is all the admissibility test needs.
    const Subspace p0(nullspace(base.pairing().transpose(), tol.rank).basis);
    const double res = containment_residual(p0, domain, mp);
    if (res > tol.containment)
        throw NotAdmissible("domain does not contain the annihilated part (sine " + std::to_string(res) + ")");

    OperatorPair op;
    op.base = base;
    op.domain = orthonormalize(domain.basis, mp, tol.rank);
    const Mat b = base.pairing();
    const Mat rows = op.domain.basis.transpose() * b;
    op.adjoint_domain =
        rows.rows() ? orthonormalize(nullspace(rows, tol.rank).basis, mq, tol.rank) : Subspace::full(base.dim_q());
    if (op.adjoint_domain.dim() && op.domain.dim())
        op.pairing_residual = (op.domain.basis.transpose() * b * op.adjoint_domain.basis).cwiseAbs().maxCoeff();
    const Mat back_rows = (b * op.adjoint_domain.basis).transpose();
    const Subspace back = back_rows.rows() ? orthonormalize(nullspace(back_rows, tol.rank).basis, mp, tol.rank)
                                           : Subspace::full(base.dim_p());
    op.roundtrip_angle = back.dim() == op.domain.dim() ? max_principal_angle(back, op.domain, mp) : M_PI / 2;
    return op;
}

CrtCheck quantified_crt_check(const OperatorPair& pair, const BasePairReport& rep, const Tolerances& tol) {
    const PairData& b = pair.base;
    CrtCheck c;
    c.icr_primal = icr_of(b.t, pair.domain, Metric(b.gram_p()), eye(b.dim_y()), tol);
    c.icr_adjoint = icr_of(b.ts, pair.adjoint_domain, Metric(b.gram_q()), eye(b.dim_x()), tol);
    if (rep.alpha <= 0.0 || rep.beta <= 0.0) {
        c.bound_primal = c.bound_adjoint = INFINITY;
        c.bound_ok = false;
        return c;
    }
    c.bound_primal = (1.0 + 1.0 / rep.alpha) * rep.icr_tilde + c.icr_adjoint / rep.alpha + rep.icr_under;
    c.bound_adjoint = (1.0 + 1.0 / rep.beta) * rep.icr_tilde_adj + c.icr_primal / rep.beta + rep.icr_under_adj;
    const double slack = 1e-10;
    c.bound_ok = c.icr_primal <= c.bound_primal * (1 + slack) && c.icr_adjoint <= c.bound_adjoint * (1 + slack);
    return c;
}

OperatorPair whitney_operator_pair(std::shared_ptr<const Mesh> mesh, int k, BC bc, const Tolerances& tol) {
    const PairData base = whitney_pair_data(mesh, k);
    const GlobalSpace w = abc(mesh, k, bc, tol).space;
    return partial_adjoint_of(Subspace(w.coords()), base, tol);
}

Subspace kernel_p0(const GlobalSpace& space, DiffOp op, const Tolerances& tol) {
    const int n = space.dim();
    const int target = op == DiffOp::d ? space.k + 1 : space.k - 1;
    const Mat to_p0 = p0_projection(*space.layout) * space.coords();
    if (target < 0 || target > n) return orth(Subspace(to_p0), tol.rank);
    const LayoutPtr tl = make_layout(space.layout->mesh, target, LocalFamily::p0);
    const Mat t = broken_op(*space.layout, op, *tl) * space.coords();
    const Subspace ker = kernel_of(t, Subspace::full(space.dofs()), Metric(space.gram_l2), eye(tl->dim), tol.rank);
    return orth(Subspace(Mat(to_p0 * ker.basis)), tol.rank);
}

Subspace range_p0(const GlobalSpace& space, DiffOp op, const Tolerances& tol) {
    const int n = space.dim();
    const int target = op == DiffOp::d ? space.k + 1 : space.k - 1;
    if (target < 0 || target > n) throw DegreeOverflow("range degree out of [0, n]");
    const LayoutPtr tl = make_layout(space.layout->mesh, target, LocalFamily::p0);
    const Mat t = p0_projection(*tl) * broken_op(*space.layout, op, *tl) * space.coords();
    return orth(Subspace(t), tol.rank);
}

HarmonicSpace harmonic_space(const Subspace& kernel, const Subspace& range, int k, HarmonicFlavor flavor, BC bc,
                             const Tolerances& tol) {
    const Metric g = eye(kernel.ambient());
    const double res = containment_residual(range, kernel, g);
    if (res > tol.containment)
        throw NotAComplex("range not contained in kernel (sine " + std::to_string(res) + ")");
    HarmonicSpace h;
    h.space = gram_complement(range, kernel, g, tol);
    h.k = k;
    h.flavor = flavor;
    h.bc = bc;
    return h;
}

namespace {

HarmonicSpace build_harmonic(std::shared_ptr<const Mesh> mesh, int k, HarmonicFlavor flavor, BC bc,
                             const Tolerances& tol) {
    const int n = mesh->dim();
    if (k < 0 || k > n) throw DegreeOverflow("harmonic degree out of [0, n]");
    const int full = p0_dim(*mesh, k);
    Subspace ker, ran = Subspace::zero(full);
    switch (flavor) {
    case HarmonicFlavor::abc:
        ker = kernel_p0(abc(mesh, k, bc, tol).space, DiffOp::d, tol);
        if (k >= 1) ran = range_p0(abc(mesh, k - 1, bc, tol).space, DiffOp::d, tol);
        break;
    case HarmonicFlavor::conforming:
        ker = kernel_p0(conforming_whitney(mesh, k, bc), DiffOp::d, tol);
        if (k >= 1) ran = range_p0(conforming_whitney(mesh, k - 1, bc), DiffOp::d, tol);
        break;
    case HarmonicFlavor::dual_conforming:
        ker = kernel_p0(conforming_dual(mesh, k, bc), DiffOp::delta, tol);
        if (k + 1 <= n) ran = range_p0(conforming_dual(mesh, k + 1, bc), DiffOp::delta, tol);
        break;
    }
    return harmonic_space(ker, ran, k, flavor, bc, tol);
}

}  // namespace

HarmonicSpace discrete_harmonic(std::shared_ptr<const Mesh> mesh, int k, HarmonicFlavor flavor, BC bc,
                                const Tolerances& tol) {
    static MeshMemo<HarmonicSpace> memo;
    return memo.get(mesh, k, 4 * static_cast<int>(flavor) + static_cast<int>(bc), tol.rank, tol.containment,
                    [&] { return build_harmonic(mesh, k, flavor, bc, tol); });
}

DecompositionReport helmholtz_check(std::shared_ptr<const Mesh> mesh, int k, BC bc, const Tolerances& tol) {
    const int n = mesh->dim();
    if (k < 0 || k > n) throw DegreeOverflow("degree out of [0, n]");
    DecompositionReport r;
    r.name = "helmholtz k=" + std::to_string(k) + " bc=" + bc_name(bc);
    const GlobalSpace w = abc(mesh, k, bc, tol).space;
    const int f0 = p0_dim(*mesh, k);
    const Metric g0 = eye(f0);

    Subspace r_delta = Subspace::zero(f0);
    GlobalSpace ws;
    const bool has_dual = k + 1 <= n;
    if (has_dual) {
        ws = conforming_dual(mesh, k + 1, swap_bc(bc));
        r_delta = range_p0(ws, DiffOp::delta, tol);
    }
    const Subspace n_d = kernel_p0(w, DiffOp::d, tol);
    r.dims = {{"P0^k", f0}, {"R_delta", r_delta.dim()}, {"N_d", n_d.dim()}};
    r.dims_match = r_delta.dim() + n_d.dim() == f0;
    r.orthogonality_residual = cross_gram(r_delta, n_d, g0);
    r.identity_angle = max_principal_angle(span_sum(r_delta, n_d, g0), Subspace::full(f0), g0);

    if (has_dual) {
        const int f1 = p0_dim(*mesh, k + 1);
        const Metric g1 = eye(f1);
        const Subspace r_d = range_p0(w, DiffOp::d, tol);
        const Subspace n_delta = kernel_p0(ws, DiffOp::delta, tol);
        r.dims.insert(r.dims.end(), {{"P0^k+1", f1}, {"R_d", r_d.dim()}, {"N_delta", n_delta.dim()}});
        r.dims_match = r.dims_match && r_d.dim() + n_delta.dim() == f1;
        r.orthogonality_residual = std::max(r.orthogonality_residual, cross_gram(r_d, n_delta, g1));
        r.identity_angle =
            std::max(r.identity_angle, max_principal_angle(span_sum(r_d, n_delta, g1), Subspace::full(f1), g1));
    } else {
        r.note = "top degree: range side is {0}";
    }
    set_pass(r, tol);
    return r;
}

DecompositionReport hodge_check(std::shared_ptr<const Mesh> mesh, int k, BC bc, const Tolerances& tol) {
    const int n = mesh->dim();
    if (k < 0 || k > n) throw DegreeOverflow("degree out of [0, n]");
    DecompositionReport r;
    r.name = "hodge k=" + std::to_string(k) + " bc=" + bc_name(bc);
    const int f = p0_dim(*mesh, k);
    const Metric g = eye(f);
    const Subspace r_d = k >= 1 ? range_p0(abc(mesh, k - 1, bc, tol).space, DiffOp::d, tol) : Subspace::zero(f);
    const HarmonicSpace h = discrete_harmonic(mesh, k, HarmonicFlavor::abc, bc, tol);
    const Subspace r_delta =
        k + 1 <= n ? range_p0(conforming_dual(mesh, k + 1, swap_bc(bc)), DiffOp::delta, tol) : Subspace::zero(f);
    r.dims = {{"P0^k", f}, {"R_d", r_d.dim()}, {"H", h.space.dim()}, {"R_delta", r_delta.dim()}};
    r.dims_match = r_d.dim() + h.space.dim() + r_delta.dim() == f;
    r.orthogonality_residual = std::max({cross_gram(r_d, h.space, g), cross_gram(r_d, r_delta, g),
                                         cross_gram(h.space, r_delta, g)});
    const Subspace sum = span_sum(span_sum(r_d, h.space, g), r_delta, g);
    r.identity_angle = max_principal_angle(sum, Subspace::full(f), g);
    set_pass(r, tol);
    return r;
}

DecompositionReport pl_duality_check(std::shared_ptr<const Mesh> mesh, int k, const Tolerances& tol) {
    const int n = mesh->dim();
    if (k < 0 || k > n) throw DegreeOverflow("degree out of [0, n]");
    DecompositionReport r;
    r.name = "pl-duality k=" + std::to_string(k);
    const Mat star = p0_star(*mesh, n - k);
    const Metric g = eye(p0_dim(*mesh, k));
    r.dims_match = true;
    for (BC bc : {BC::none, BC::homogeneous}) {
        const HarmonicSpace ha = discrete_harmonic(mesh, k, HarmonicFlavor::abc, bc, tol);
        const HarmonicSpace hc = discrete_harmonic(mesh, n - k, HarmonicFlavor::conforming, swap_bc(bc), tol);
        const Subspace starred(Mat(star * hc.space.basis));
        const std::string tag = bc == BC::none ? "h" : "h0";
        r.dims.emplace_back("H_abc_" + tag, ha.space.dim());
        r.dims.emplace_back("star_H_" + (bc == BC::none ? std::string("h0") : std::string("h")), starred.dim());
        r.dims_match = r.dims_match && ha.space.dim() == starred.dim();
        if (ha.space.dim() == starred.dim() && starred.dim() > 0)
            r.identity_angle = std::max(r.identity_angle, max_principal_angle(ha.space, starred, g));
        else if (ha.space.dim() != starred.dim())
            r.identity_angle = M_PI / 2;
    }
    set_pass(r, tol);
    return r;
}

DecompositionReport horizontal_duality_check(std::shared_ptr<const Mesh> mesh, int k, const Tolerances& tol) {
    const int n = mesh->dim();
    if (k < 0 || k > n - 1) throw DegreeOverflow("pair degree must lie in [0, n-1]");
    DecompositionReport r;
    r.name = "horizontal-duality k=" + std::to_string(k);
    const GlobalSpace wh = abc(mesh, k, BC::none, tol).space;
    const GlobalSpace w0 = abc(mesh, k, BC::homogeneous, tol).space;
    const GlobalSpace sh = conforming_dual(mesh, k + 1, BC::none);
    const GlobalSpace s0 = conforming_dual(mesh, k + 1, BC::homogeneous);

    // Y side: R(d, W^abc_h) - R(d, W^abc_h0) against N(delta, W*_h) - N(delta, W*_h0).
    const Subspace dR = complement(range_p0(w0, DiffOp::d, tol), range_p0(wh, DiffOp::d, tol), tol);
    const Subspace dN = complement(kernel_p0(s0, DiffOp::delta, tol), kernel_p0(sh, DiffOp::delta, tol), tol);
    // X side: R(delta, W*_h) - R(delta, W*_h0) against N(d, W^abc_h) - N(d, W^abc_h0).
    const Subspace dRs = complement(range_p0(s0, DiffOp::delta, tol), range_p0(sh, DiffOp::delta, tol), tol);
    const Subspace dNs = complement(kernel_p0(w0, DiffOp::d, tol), kernel_p0(wh, DiffOp::d, tol), tol);

    r.dims = {{"dR", dR.dim()}, {"dN", dN.dim()}, {"dR*", dRs.dim()}, {"dN*", dNs.dim()}};
    r.dims_match = dR.dim() == dN.dim() && dRs.dim() == dNs.dim();
    const Metric g1 = eye(p0_dim(*mesh, k + 1)), g0 = eye(p0_dim(*mesh, k));
    if (r.dims_match) {
        const double a1 = dR.dim() ? max_principal_angle(dR, dN, g1) : 0.0;
        const double a0 = dRs.dim() ? max_principal_angle(dRs, dNs, g0) : 0.0;
        r.identity_angle = std::max(a1, a0);
        if (r.identity_angle >= tol.identity) {
            const BasePairReport bp = whitney_base_pair_report(*mesh, k, tol);
            const double s = std::min(slice_infsup(dR, dN, tol.rank), slice_infsup(dRs, dNs, tol.rank));
            r.note = "slices differ; inf-sup " + std::to_string(s) + " vs min(alpha, beta) " +
                     std::to_string(std::min(bp.alpha, bp.beta));
        }
    } else {
        r.identity_angle = M_PI / 2;
    }
    set_pass(r, tol);
    return r;
}

DecompositionReport complex_check(std::shared_ptr<const Mesh> mesh, BC bc, const Tolerances& tol) {
    const int n = mesh->dim();
    DecompositionReport r;
    r.name = "complex bc=" + bc_name(bc);
    std::vector<GlobalSpace> w, s;
    for (int k = 0; k <= n; ++k) {
        w.push_back(abc(mesh, k, bc, tol).space);
        s.push_back(conforming_dual(mesh, k, swap_bc(bc)));
    }
    double worst = 0.0;
    for (int k = 0; k <= n; ++k) {
        const Subspace kd = kernel_p0(w[k], DiffOp::d, tol);
        const Subspace rd = k >= 1 ? range_p0(w[k - 1], DiffOp::d, tol) : Subspace::zero(kd.ambient());
        const Subspace ks = kernel_p0(s[k], DiffOp::delta, tol);
        const Subspace rs = k + 1 <= n ? range_p0(s[k + 1], DiffOp::delta, tol) : Subspace::zero(ks.ambient());
        const Metric g = eye(kd.ambient());
        worst = std::max({worst, containment_residual(rd, kd, g), containment_residual(rs, ks, g)});
        r.dims.emplace_back("b" + std::to_string(k), kd.dim() - rd.dim());
        r.dims.emplace_back("b*" + std::to_string(k), ks.dim() - rs.dim());
    }
    r.orthogonality_residual = 0.0;
    r.identity_angle = std::asin(std::min(1.0, worst));
    r.dims_match = true;
    r.note = "identity_angle is the worst range-in-kernel sine";
    set_pass(r, tol);
    return r;
}

}  // namespace padfeec
