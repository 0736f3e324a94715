#include "padfeec/spaces.hpp"

#include "padfeec/errors.hpp"
#include "padfeec/parallel.hpp"
#include "memo.hpp"

#include "json.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace padfeec {

std::string bc_name(BC bc) { return bc == BC::none ? "none" : "homogeneous"; }

BC parse_bc(const std::string& s) {
    if (s == "none") return BC::none;
    if (s == "homogeneous" || s == "h0") return BC::homogeneous;
    throw InvalidParameter("unknown bc '" + s + "' (expected none or homogeneous)");
}

std::string kind_name(SpaceKind k) {
    switch (k) {
        case SpaceKind::broken: return "broken";
        case SpaceKind::conforming: return "conforming";
        case SpaceKind::conforming0: return "conforming0";
        case SpaceKind::star: return "star";
        case SpaceKind::star0: return "star0";
        case SpaceKind::abc: return "abc";
        case SpaceKind::abc0: return "abc0";
        case SpaceKind::p0: return "p0";
        case SpaceKind::mixed: return "mixed";
        case SpaceKind::vm: return "vm";
        case SpaceKind::vm0: return "vm0";
    }
    return "?";
}

CellGeometry cell_geometry(const Mesh& mesh, int c) {
    const int n = mesh.dim();
    std::vector<Vec> pts;
    for (int v : mesh.cell(c)) {
        Vec p(n);
        for (int i = 0; i < n; ++i) p(i) = mesh.vertices()[v][i];
        pts.push_back(p);
    }
    return CellGeometry(pts);
}

LayoutPtr make_layout(std::shared_ptr<const Mesh> mesh, int k, LocalFamily family) {
    const int n = mesh->dim();
    if (k < 0 || k > n) throw InvalidParameter("form degree " + std::to_string(k) + " out of range");
    auto out = std::make_shared<BrokenLayout>();
    out->mesh = mesh;
    out->k = k;
    out->family = family;
    out->local.resize(mesh->num_cells());
    parallel_for(mesh->num_cells(), [&](int c) {
        const CellGeometry g = cell_geometry(*mesh, c);
        switch (family) {
            case LocalFamily::primal: out->local[c] = whitney_local(g, k, Variant::primal); break;
            case LocalFamily::dual: out->local[c] = whitney_local(g, k, Variant::dual); break;
            case LocalFamily::p0: out->local[c] = p0_local(g, k); break;
            case LocalFamily::mixed: out->local[c] = mixed_local(g, k); break;
        }
    });
    int off = 0;
    for (const auto& l : out->local) {
        out->offset.push_back(off);
        off += l.dim();
    }
    out->dim = off;
    return out;
}

namespace {

void require_same_mesh(const BrokenLayout& a, const BrokenLayout& b) {
    if (a.mesh != b.mesh && a.mesh->num_cells() != b.mesh->num_cells())
        throw InvalidParameter("layouts live on different meshes");
}

const FormOp kIdentity = [](const PolyForm& w) { return w; };

FormOp op_fn(DiffOp op) {
    return [op](const PolyForm& w) { return apply_op(op, w); };
}

DiffOp adjoint_of(DiffOp op) { return op == DiffOp::d ? DiffOp::delta : DiffOp::d; }

Mat energy_of(const BrokenLayout& layout) {
    const int n = layout.mesh->dim();
    Mat e = Mat::Zero(layout.dim, layout.dim);
    auto add = [&](DiffOp op, int target) {
        const LayoutPtr p0 = make_layout(layout.mesh, target, LocalFamily::p0);
        const Mat t = broken_op(layout, op, *p0);
        e += t.transpose() * t;
    };
    const bool use_d = layout.family != LocalFamily::dual && layout.family != LocalFamily::p0;
    const bool use_delta = layout.family != LocalFamily::primal && layout.family != LocalFamily::p0;
    if (use_d && layout.k < n) add(DiffOp::d, layout.k + 1);
    if (use_delta && layout.k > 0) add(DiffOp::delta, layout.k - 1);
    return e;
}

void finish(GlobalSpace& s) {
    const Mat e = energy_of(*s.layout);
    if (s.identity) {
        s.gram_l2 = Mat::Identity(s.layout->dim, s.layout->dim);
        s.gram_energy = e;
    } else {
        s.gram_l2 = s.basis.transpose() * s.basis;
        s.gram_energy = s.basis.transpose() * e * s.basis;
    }
}

// Dofs of a conforming Whitney space: sub-simplex index -> column (or -1).
std::vector<int> conforming_dofs(const Mesh& mesh, int k, BC bc, int* count) {
    const auto& t = mesh.subsimplices(k);
    std::vector<int> dof(t.size(), -1);
    int m = 0;
    for (int s = 0; s < t.size(); ++s)
        if (bc == BC::none || !t.boundary[s]) dof[s] = m++;
    if (count) *count = m;
    return dof;
}

Mat rank_checked_nullspace(const Mat& rows, int cols, const Tolerances& tol, int* rank) {
    if (rows.rows() == 0) {
        if (rank) *rank = 0;
        return Mat::Identity(cols, cols);
    }
    const auto sv = singular_values(rows);
    const double smax = sv.empty() ? 0.0 : sv.front();
    int r = 0;
    for (double s : sv) {
        const double rel = smax > 0 ? s / smax : 0.0;
        if (rel > tol.rank && rel < 1e3 * tol.rank)
            throw ToleranceFailure("constraint singular value " + std::to_string(rel) +
                                   " (relative) falls in the ambiguous band above the rank tolerance");
        if (rel > tol.rank) ++r;
    }
    if (rank) *rank = r;
    return nullspace(rows, tol.rank).basis;
}

}  // namespace

Mat broken_inner(const BrokenLayout& a, const FormOp& fa, const BrokenLayout& b, const FormOp& fb) {
    require_same_mesh(a, b);
    Mat out = Mat::Zero(a.dim, b.dim);
    parallel_for(static_cast<int>(a.local.size()), [&](int c) {
        std::vector<PolyForm> ia, ib;
        for (const auto& f : a.local[c].basis) ia.push_back(fa(f));
        for (const auto& f : b.local[c].basis) ib.push_back(fb(f));
        out.block(a.offset[c], b.offset[c], a.local_dim(c), b.local_dim(c)) = form_gram(ia, ib, a.local[c].cell);
    });
    return out;
}

Mat broken_op(const BrokenLayout& src, DiffOp op, const BrokenLayout& dst) {
    require_same_mesh(src, dst);
    const int expect = src.k + (op == DiffOp::d ? 1 : -1);
    if (dst.k != expect) throw DegreeMismatch("target degree does not match the operator");
    Mat out = Mat::Zero(dst.dim, src.dim);
    std::vector<double> worst(src.local.size(), 0.0);
    parallel_for(static_cast<int>(src.local.size()), [&](int c) {
        std::vector<PolyForm> img;
        for (const auto& f : src.local[c].basis) img.push_back(apply_op(op, f));
        double res = 0.0;
        out.block(dst.offset[c], src.offset[c], dst.local_dim(c), src.local_dim(c)) =
            coordinates_in(dst.local[c], img, &res);
        worst[c] = res;
    });
    for (size_t c = 0; c < worst.size(); ++c)
        if (worst[c] > 1e-8)
            throw AssemblyError("operator image leaves the target space on cell " + std::to_string(c));
    return out;
}

Mat p0_projection(const BrokenLayout& src) {
    const int n = src.mesh->dim();
    const int b = static_cast<int>(multi_indices(n, src.k).size());
    const int cells = static_cast<int>(src.local.size());
    Mat out = Mat::Zero(b * cells, src.dim);
    parallel_for(cells, [&](int c) {
        const LocalSpace p0 = p0_local(src.local[c].cell, src.k);
        out.block(b * c, src.offset[c], b, src.local_dim(c)) = form_gram(p0.basis, src.local[c].basis, p0.cell);
    });
    return out;
}

Mat p0_star(const Mesh& mesh, int j) {
    const int n = mesh.dim();
    const int bj = static_cast<int>(multi_indices(n, j).size());
    const int bs = static_cast<int>(multi_indices(n, n - j).size());
    Mat out = Mat::Zero(bs * mesh.num_cells(), bj * mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellGeometry g = cell_geometry(mesh, c);
        const LocalSpace from = p0_local(g, j), to = p0_local(g, n - j);
        std::vector<PolyForm> img;
        for (const auto& f : from.basis) img.push_back(hodge_star(f));
        out.block(bs * c, bj * c, bs, bj) = form_gram(to.basis, img, g);
    }
    return out;
}

Mat broken_pairing(const BrokenLayout& a, DiffOp op, const BrokenLayout& b) {
    const int expect = a.k + (op == DiffOp::d ? 1 : -1);
    if (b.k != expect) throw DegreeMismatch("pairing degrees are incompatible");
    return broken_inner(a, kIdentity, b, op_fn(adjoint_of(op))) - broken_inner(a, op_fn(op), b, kIdentity);
}

GlobalSpace broken_space(std::shared_ptr<const Mesh> mesh, int k, Variant v) {
    GlobalSpace s;
    s.layout = make_layout(std::move(mesh), k, v == Variant::primal ? LocalFamily::primal : LocalFamily::dual);
    s.kind = SpaceKind::broken;
    s.k = k;
    s.identity = true;
    finish(s);
    return s;
}

GlobalSpace p0_space(std::shared_ptr<const Mesh> mesh, int k) {
    GlobalSpace s;
    s.layout = make_layout(std::move(mesh), k, LocalFamily::p0);
    s.kind = SpaceKind::p0;
    s.k = k;
    s.identity = true;
    finish(s);
    return s;
}

GlobalSpace conforming_whitney(std::shared_ptr<const Mesh> mesh, int k, BC bc) {
    GlobalSpace s;
    s.layout = make_layout(mesh, k, LocalFamily::primal);
    s.kind = bc == BC::none ? SpaceKind::conforming : SpaceKind::conforming0;
    s.k = k;
    int m = 0;
    const auto dof = conforming_dofs(*mesh, k, bc, &m);
    const auto& table = mesh->subsimplices(k);
    const auto local = combinations(mesh->dim() + 1, k + 1);
    s.basis = Mat::Zero(s.layout->dim, m);
    const BrokenLayout& lay = *s.layout;
    parallel_for(mesh->num_cells(), [&](int c) {
        std::vector<PolyForm> forms;
        std::vector<int> cols;
        for (size_t j = 0; j < local.size(); ++j) {
            const int col = dof[table.cell_subs[c][j]];
            if (col < 0) continue;
            forms.push_back(whitney_form(lay.local[c].cell, local[j]) * table.cell_signs[c][j]);
            cols.push_back(col);
        }
        double res = 0.0;
        const Mat co = coordinates_in(lay.local[c], forms, &res);
        if (res > 1e-8) throw AssemblyError("Whitney form outside the local space on cell " + std::to_string(c));
        for (size_t j = 0; j < cols.size(); ++j) s.basis.block(lay.offset[c], cols[j], lay.local_dim(c), 1) = co.col(j);
    });
    finish(s);
    return s;
}

GlobalSpace star_space(const GlobalSpace& space) {
    if (space.kind != SpaceKind::conforming && space.kind != SpaceKind::conforming0)
        throw InvalidParameter("star_space expects a conforming Whitney space");
    GlobalSpace s;
    s.layout = make_layout(space.layout->mesh, space.dim() - space.k, LocalFamily::dual);
    s.kind = space.kind == SpaceKind::conforming ? SpaceKind::star : SpaceKind::star0;
    s.k = s.layout->k;
    s.basis = space.basis;
    finish(s);
    return s;
}

GlobalSpace conforming_dual(std::shared_ptr<const Mesh> mesh, int k, BC bc) {
    const int n = mesh->dim();
    return star_space(conforming_whitney(std::move(mesh), n - k, bc));
}

double trace_continuity_defect(const GlobalSpace& space) {
    const BrokenLayout& lay = *space.layout;
    if (lay.family != LocalFamily::primal) throw InvalidParameter("trace check needs a primal-family space");
    const Mesh& mesh = space.mesh();
    const int n = mesh.dim();
    if (space.k > n - 1) return 0.0;
    const auto& facets = mesh.subsimplices(n - 1);
    const Mat coords = space.coords();
    double worst = 0.0;
    for (int f = 0; f < facets.size(); ++f) {
        if (facets.star[f].size() != 2) continue;
        std::vector<Vec> pts;
        for (int v : facets.simplices[f]) {
            Vec p(n);
            for (int i = 0; i < n; ++i) p(i) = mesh.vertices()[v][i];
            pts.push_back(p);
        }
        const int c1 = facets.star[f][0], c2 = facets.star[f][1];
        std::vector<PolyForm> t1, t2;
        for (const auto& b : lay.local[c1].basis) t1.push_back(trace_on(b, pts));
        for (const auto& b : lay.local[c2].basis) t2.push_back(trace_on(b, pts));
        for (int j = 0; j < coords.cols(); ++j) {
            const Vec a1 = coords.block(lay.offset[c1], j, lay.local_dim(c1), 1);
            const Vec a2 = coords.block(lay.offset[c2], j, lay.local_dim(c2), 1);
            if (a1.norm() == 0.0 && a2.norm() == 0.0) continue;
            PolyForm diff(n - 1, space.k);
            for (int i = 0; i < a1.rows(); ++i) diff += t1[i] * a1(i);
            for (int i = 0; i < a2.rows(); ++i) diff -= t2[i] * a2(i);
            worst = std::max(worst, diff.max_abs_coeff());
        }
    }
    return worst;
}

namespace {

AbcResult build_abc(std::shared_ptr<const Mesh> mesh, int k, BC bc, const Tolerances& tol) {
    const int n = mesh->dim();
    AbcResult r;
    GlobalSpace& s = r.space;
    s.layout = make_layout(mesh, k, LocalFamily::primal);
    s.kind = bc == BC::none ? SpaceKind::abc : SpaceKind::abc0;
    s.k = k;
    if (k == n) {
        s.identity = true;
        r.constraints.rows = Mat(0, s.layout->dim);
        finish(s);
        return r;
    }
    const LayoutPtr q = make_layout(mesh, k + 1, LocalFamily::dual);
    const Mat b = broken_pairing(*s.layout, DiffOp::d, *q);
    const GlobalSpace cons = conforming_dual(mesh, k + 1, swap_bc(bc));
    r.constraints.rows = (b * cons.basis).transpose();
    s.basis = rank_checked_nullspace(r.constraints.rows, s.layout->dim, tol, &r.constraints.rank);
    s.constraint_rank = r.constraints.rank;
    finish(s);
    return r;
}

}  // namespace

AbcResult abcfes_by_constraints(std::shared_ptr<const Mesh> mesh, int k, BC bc, const Tolerances& tol) {
    static MeshMemo<AbcResult> memo;
    return memo.get(mesh, k, static_cast<int>(bc), tol.rank, tol.containment,
                    [&] { return build_abc(mesh, k, bc, tol); });
}

int BasisAtlas::count(BasisCategory c) const {
    int m = 0;
    for (const auto& f : functions) m += f.category == c;
    return m;
}

std::vector<int> BasisAtlas::type_ii_per_anchor(int anchors) const {
    std::vector<int> out(anchors, 0);
    for (const auto& f : functions)
        if (f.category == BasisCategory::type_ii) ++out.at(f.anchor);
    return out;
}

Mat BasisAtlas::to_broken() const {
    Mat out = Mat::Zero(layout->dim, static_cast<int>(functions.size()));
    for (size_t j = 0; j < functions.size(); ++j) {
        const auto& f = functions[j];
        for (size_t i = 0; i < f.cells.size(); ++i)
            out.block(layout->offset[f.cells[i]], j, f.coeffs[i].size(), 1) = f.coeffs[i];
    }
    return out;
}

BasisAtlas abcfes_local_basis(std::shared_ptr<const Mesh> mesh, int k, BC bc, const Tolerances& tol) {
    const int n = mesh->dim();
    BasisAtlas atlas;
    atlas.layout = make_layout(mesh, k, LocalFamily::primal);
    const BrokenLayout& lay = *atlas.layout;
    const int cells = mesh->num_cells();
    if (k == n) {
        for (int c = 0; c < cells; ++c)
            for (int i = 0; i < lay.local_dim(c); ++i)
                atlas.functions.push_back({BasisCategory::type_i, c, {c}, {Vec::Unit(lay.local_dim(c), i)}});
        return atlas;
    }
    // Constraining functions live on (n-k-1)-simplices f; star(f) is their support.
    const int fdeg = n - k - 1;
    const BC cbc = swap_bc(bc);
    int m = 0;
    const auto dof = conforming_dofs(*mesh, fdeg, cbc, &m);
    const auto& ftable = mesh->subsimplices(fdeg);
    const LayoutPtr q = make_layout(mesh, k + 1, LocalFamily::dual);
    const Mat b = broken_pairing(lay, DiffOp::d, *q);
    const GlobalSpace cons = conforming_dual(mesh, k + 1, cbc);

    // Per cell: restricted constraint functionals, their dual vectors v^K, Type-I part.
    std::vector<std::vector<int>> local_f(cells);
    std::vector<Mat> vk(cells);
    std::vector<Mat> type_i(cells);
    parallel_for(cells, [&](int c) {
        for (int s : ftable.cell_subs[c])
            if (dof[s] >= 0) local_f[c].push_back(dof[s]);
        const int dp = lay.local_dim(c), dq = q->local_dim(c);
        Mat mk(dp, local_f[c].size());
        const Mat bk = b.block(lay.offset[c], q->offset[c], dp, dq);
        for (size_t j = 0; j < local_f[c].size(); ++j)
            mk.col(j) = bk * cons.basis.block(q->offset[c], local_f[c][j], dq, 1);
        if (numerical_rank(mk, tol.rank) < mk.cols())
            throw AssumptionViolation(c, "restricted dual basis functions are linearly dependent");
        if (mk.cols() > 0) vk[c] = mk * (mk.transpose() * mk).ldlt().solve(Mat::Identity(mk.cols(), mk.cols()));
        type_i[c] = mk.cols() > 0 ? nullspace(mk.transpose(), tol.rank).basis : Mat(Mat::Identity(dp, dp));
    });
    for (int c = 0; c < cells; ++c)
        for (int j = 0; j < type_i[c].cols(); ++j)
            atlas.functions.push_back({BasisCategory::type_i, c, {c}, {type_i[c].col(j)}});

    // Type-II: along a facet-adjacency spanning tree of each star, v^K - v^parent.
    std::vector<int> fsub(m, -1);
    for (int s = 0; s < ftable.size(); ++s)
        if (dof[s] >= 0) fsub[dof[s]] = s;
    auto column_of = [&](int c, int f) {
        for (size_t j = 0; j < local_f[c].size(); ++j)
            if (local_f[c][j] == f) return static_cast<int>(j);
        throw AssemblyError("constraint not local to cell");
    };
    auto adjacent = [&](int a, int c) {
        const auto& x = mesh->cell(a);
        const auto& y = mesh->cell(c);
        int shared = 0;
        for (int v : x) shared += std::count(y.begin(), y.end(), v);
        return shared == n;
    };
    for (int f = 0; f < m; ++f) {
        const auto& star = ftable.star[fsub[f]];
        if (star.empty()) continue;
        std::vector<int> parent(star.size(), -2);
        std::deque<int> queue{0};
        parent[0] = -1;
        while (!queue.empty()) {
            const int a = queue.front();
            queue.pop_front();
            for (size_t j = 0; j < star.size(); ++j)
                if (parent[j] == -2 && adjacent(star[a], star[j])) {
                    parent[j] = a;
                    queue.push_back(j);
                }
        }
        for (size_t j = 1; j < star.size(); ++j) {
            const int pj = parent[j] >= 0 ? parent[j] : 0;  // disconnected star: tie to the root
            const int ck = star[j], cp = star[pj];
            atlas.functions.push_back({BasisCategory::type_ii,
                                       fsub[f],
                                       {ck, cp},
                                       {vk[ck].col(column_of(ck, f)), -vk[cp].col(column_of(cp, f))}});
        }
    }
    return atlas;
}

GlobalSpace vm_space(std::shared_ptr<const Mesh> mesh, int k, BC bc, const Tolerances& tol) {
    const int n = mesh->dim();
    GlobalSpace s;
    s.layout = make_layout(mesh, k, LocalFamily::mixed);
    s.kind = bc == BC::none ? SpaceKind::vm : SpaceKind::vm0;
    s.k = k;
    std::vector<Mat> blocks;
    if (k < n) {
        const LayoutPtr q = make_layout(mesh, k + 1, LocalFamily::dual);
        const GlobalSpace eta = conforming_dual(mesh, k + 1, swap_bc(bc));
        blocks.push_back((broken_pairing(*s.layout, DiffOp::d, *q) * eta.basis).transpose());
    }
    if (k > 0) {
        const GlobalSpace tau = abcfes_by_constraints(mesh, k - 1, bc, tol).space;
        blocks.push_back((broken_pairing(*s.layout, DiffOp::delta, *tau.layout) * tau.coords()).transpose());
    }
    int rows = 0;
    for (const auto& b : blocks) rows += static_cast<int>(b.rows());
    Mat all(rows, s.layout->dim);
    int at = 0;
    for (const auto& b : blocks) {
        all.middleRows(at, b.rows()) = b;
        at += static_cast<int>(b.rows());
    }
    s.basis = rank_checked_nullspace(all, s.layout->dim, tol, &s.constraint_rank);
    finish(s);
    return s;
}

PairData whitney_pair_data(std::shared_ptr<const Mesh> mesh, int k) {
    const LayoutPtr p = make_layout(mesh, k, LocalFamily::primal);
    const LayoutPtr q = make_layout(mesh, k + 1, LocalFamily::dual);
    PairData d;
    d.t = broken_op(*p, DiffOp::d, *q);
    d.ts = broken_op(*q, DiffOp::delta, *p);
    d.ax_identity = d.ay_identity = true;
    return d;
}

std::string space_summary_json(const GlobalSpace& space, const BasisAtlas* atlas) {
    nlohmann::ordered_json j;
    j["kind"] = kind_name(space.kind);
    j["k"] = space.k;
    j["n"] = space.dim();
    j["cells"] = space.mesh().num_cells();
    j["broken_dim"] = space.broken_dim();
    j["dim"] = space.dofs();
    j["constraint_rank"] = space.constraint_rank;
    if (atlas) {
        j["type_i"] = atlas->count(BasisCategory::type_i);
        j["type_ii"] = atlas->count(BasisCategory::type_ii);
    }
    return j.dump(2);
}

}  // namespace padfeec
