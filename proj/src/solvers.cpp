#include "padfeec/solvers.hpp"

#include "padfeec/errors.hpp"
#include "padfeec/parallel.hpp"
#include "padfeec/quadrature.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>

namespace padfeec {

namespace {

int p0_count(const Mesh& m, int k) {
    const int n = m.dim();
    if (k < 0 || k > n) return 0;
    int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r * m.num_cells();
}

Mat p0_of(const GlobalSpace& s) { return p0_projection(*s.layout) * s.coords(); }

// Canonical P0 image of op applied to the space; zero rows when the degree leaves [0, n].
Mat image_of(const GlobalSpace& s, DiffOp op) {
    const int target = op == DiffOp::d ? s.k + 1 : s.k - 1;
    if (target < 0 || target > s.dim()) return Mat(0, s.dofs());
    const LayoutPtr tl = make_layout(s.layout->mesh, target, LocalFamily::p0);
    return p0_projection(*tl) * broken_op(*s.layout, op, *tl) * s.coords();
}

Mat empty_space(int rows) { return Mat(rows, 0); }

struct Solved {
    Vec x;
    double residual = 0.0;
    double condition = 0.0;
};

// Dense LU with one refinement step; symmetric systems are checked first.
Solved dense_solve(const Mat& a, const Vec& b, bool symmetric) {
    check_finite(a, "system");
    Solved s;
    if (a.rows() == 0) {
        s.x = Vec(0);
        return s;
    }
    if (symmetric) {
        const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
        if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-13 * scale)
            throw AssemblyError("assembled system is not symmetric");
    }
    Eigen::PartialPivLU<Mat> lu(a);
    s.x = lu.solve(b);
    s.x += lu.solve(b - a * s.x);
    const double rc = lu.rcond();
    s.condition = rc > 0.0 ? 1.0 / rc : INFINITY;
    const double bn = b.norm();
    s.residual = bn > 0.0 ? (a * s.x - b).norm() / bn : (a * s.x).norm();
    if (!s.x.allFinite() || s.residual > 1e-10)
        throw SolverFailure("solve residual " + std::to_string(s.residual) + ", condition estimate " +
                            std::to_string(s.condition));
    return s;
}

// Block system assembled from a list of (row, col, block) entries.
struct BlockSystem {
    std::vector<int> sizes;
    std::vector<std::tuple<int, int, Mat>> blocks;
    std::vector<Vec> rhs;

    explicit BlockSystem(std::vector<int> s) : sizes(std::move(s)) {
        for (int n : sizes) rhs.push_back(Vec::Zero(n));
    }
    void set(int i, int j, const Mat& m) { blocks.emplace_back(i, j, m); }
    // Places m at (i, j) and its transpose at (j, i).
    void set_sym(int i, int j, const Mat& m) {
        set(i, j, m);
        if (i != j) set(j, i, m.transpose());
    }
    Mat matrix() const {
        std::vector<int> off(sizes.size() + 1, 0);
        for (std::size_t i = 0; i < sizes.size(); ++i) off[i + 1] = off[i] + sizes[i];
        Mat a = Mat::Zero(off.back(), off.back());
        for (const auto& [i, j, m] : blocks)
            if (m.size()) a.block(off[i], off[j], m.rows(), m.cols()) += m;
        return a;
    }
    Vec vector() const {
        int total = 0;
        for (int n : sizes) total += n;
        Vec b(total);
        int o = 0;
        for (const auto& r : rhs) {
            b.segment(o, r.size()) = r;
            o += static_cast<int>(r.size());
        }
        return b;
    }
    std::vector<Vec> split(const Vec& x) const {
        std::vector<Vec> out;
        int o = 0;
        for (int n : sizes) {
            out.push_back(x.segment(o, n));
            o += n;
        }
        return out;
    }
};

double rel(const Vec& a, const Vec& b, double scale) {
    const double num = (a - b).norm();
    if (num == 0.0) return 0.0;
    return num / std::max({a.norm(), b.norm(), scale, 1e-300});
}

void put(std::vector<std::pair<std::string, Vec>>& v, const std::string& k, Vec x) { v.emplace_back(k, std::move(x)); }

nlohmann::ordered_json vec_json(const Vec& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

// Harmonic basis with its dimension checked against the complex.
Mat harmonic_basis(std::shared_ptr<const Mesh> mesh, int k, HarmonicFlavor fl, BC bc, const Tolerances& tol) {
    return discrete_harmonic(std::move(mesh), k, fl, bc, tol).space.basis;
}

}  // namespace

Vec project_p0(const Mesh& mesh, int k, const SourceField& f) {
    const int per = p0_count(mesh, k) / std::max(1, mesh.num_cells());
    Vec out = Vec::Zero(p0_count(mesh, k));
    if (!f.poly && !f.func) return out;
    parallel_for(mesh.num_cells(), [&](int c) {
        const LocalSpace p0 = p0_local(cell_geometry(mesh, c), k);
        const PolyForm fc = f.poly ? f.poly(c) : PolyForm();
        for (int a = 0; a < per; ++a)
            out(c * per + a) = f.poly ? l2_inner(fc, p0.basis[a], p0.cell) : quad_inner(f.func, p0.basis[a], p0.cell, 6);
    });
    return out;
}

const Vec& SchemeSolution::unknown(const std::string& name) const {
    for (const auto& [k, v] : unknowns)
        if (k == name) return v;
    throw InvalidParameter("solution has no unknown " + name);
}

const Vec& SchemeSolution::image(const std::string& name) const {
    for (const auto& [k, v] : derived)
        if (k == name) return v;
    throw InvalidParameter("solution has no image " + name);
}

std::string SchemeSolution::to_json() const {
    nlohmann::ordered_json j;
    j["scheme"] = scheme;
    j["k"] = k;
    j["bc"] = bc_name(bc);
    j["residual"] = residual;
    j["condition"] = condition;
    nlohmann::ordered_json u;
    for (const auto& [name, v] : unknowns) u[name] = vec_json(v);
    j["unknowns"] = u;
    return j.dump(2);
}

double EquivalenceReport::worst() const {
    double w = 0.0;
    for (const auto& [n, r] : residuals) w = std::max(w, r);
    return w;
}

std::string EquivalenceReport::to_json() const {
    nlohmann::ordered_json j;
    nlohmann::ordered_json r;
    for (const auto& [n, v] : residuals) r[n] = v;
    j["residuals"] = r;
    j["pass"] = pass;
    return j.dump(2);
}

std::string EquivalenceReport::to_csv() const {
    std::string s = "identity,residual\n";
    char buf[64];
    for (const auto& [n, v] : residuals) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        s += n + "," + buf + "\n";
    }
    return s;
}

SchemeSolution solve_source_primal(std::shared_ptr<const Mesh> mesh, int k, BC bc, const SourceField& f,
                                   const Tolerances& tol) {
    const GlobalSpace w = abcfes_by_constraints(mesh, k, bc, tol).space;
    const Mat pw = p0_of(w);
    const Mat dw = image_of(w, DiffOp::d);
    SchemeSolution s;
    s.scheme = "source_primal";
    s.k = k;
    s.bc = bc;
    s.pf = project_p0(*mesh, k, f);
    const Mat a = dw.transpose() * dw + pw.transpose() * pw;
    const Solved r = dense_solve(a, pw.transpose() * s.pf, true);
    s.residual = r.residual;
    s.condition = r.condition;
    put(s.unknowns, "omega", r.x);
    put(s.derived, "P_omega", pw * r.x);
    put(s.derived, "d_omega", dw * r.x);
    put(s.derived, "omega_broken", w.coords() * r.x);
    return s;
}

SchemeSolution solve_source_dual(std::shared_ptr<const Mesh> mesh, int k, BC bc, const SourceField& f,
                                 const Tolerances& tol) {
    (void)tol;
    const int n = mesh->dim();
    if (k < 0 || k > n - 1) throw DegreeOverflow("source problem needs 0 <= k <= n-1");
    const GlobalSpace z = conforming_dual(mesh, k + 1, swap_bc(bc));
    const Mat pz = p0_of(z);
    const Mat dz = image_of(z, DiffOp::delta);
    const int f0 = p0_count(*mesh, k);
    SchemeSolution s;
    s.scheme = "source_dual";
    s.k = k;
    s.bc = bc;
    s.pf = project_p0(*mesh, k, f);
    BlockSystem sys({z.dofs(), f0});
    sys.set(0, 0, pz.transpose() * pz);
    sys.set_sym(0, 1, -dz.transpose());
    sys.set(1, 1, -Mat::Identity(f0, f0));
    sys.rhs[1] = -s.pf;
    const Solved r = dense_solve(sys.matrix(), sys.vector(), true);
    const std::vector<Vec> x = sys.split(r.x);
    s.residual = r.residual;
    s.condition = r.condition;
    put(s.unknowns, "zeta", x[0]);
    put(s.unknowns, "omega_bar", x[1]);
    put(s.derived, "P_zeta", pz * x[0]);
    put(s.derived, "delta_zeta", dz * x[0]);
    return s;
}

EquivalenceReport verify_source_equivalence(const SchemeSolution& p, const SchemeSolution& d) {
    if (p.k != d.k || p.pf.size() != d.pf.size()) throw InvalidParameter("solutions are from different problems");
    EquivalenceReport r;
    const double scale = p.pf.norm();
    const Vec& pw = p.image("P_omega");
    r.residuals.emplace_back("omega_bar = P omega", rel(d.unknown("omega_bar"), pw, scale));
    r.residuals.emplace_back("P omega + delta zeta = P f", rel(Vec(pw + d.image("delta_zeta")), p.pf, scale));
    r.residuals.emplace_back("d omega = P zeta", rel(p.image("d_omega"), d.image("P_zeta"), scale));
    r.pass = r.worst() < 1e-9;
    return r;
}

std::string EigenPair::to_json() const {
    nlohmann::ordered_json j;
    j["primal"] = primal;
    j["dual"] = dual;
    j["primal_zero"] = primal_zero;
    j["primal_infinite"] = primal_infinite;
    j["dual_zero"] = dual_zero;
    j["dual_infinite"] = dual_infinite;
    j["max_relative_gap"] = max_relative_gap;
    j["match"] = match;
    return j.dump(2);
}

namespace {

// Pencil (K, K + M): theta = lambda / (1 + lambda).
void pencil(const Mat& k, const Mat& m, double eig_tol, std::vector<double>& finite, int& zero, int& infinite) {
    finite.clear();
    zero = infinite = 0;
    if (k.rows() == 0) return;
    const SpectralReport rep = generalized_eig(k, k + m, Subspace::full(static_cast<int>(k.rows())), eig_tol);
    for (std::size_t i = 0; i < rep.values.size(); ++i) {
        const double th = rep.values[i];
        if (std::abs(th) <= eig_tol) {
            ++zero;
        } else if (1.0 - th < 1e-10) {
            ++infinite;
        } else {
            // th/(1-th) loses digits as th -> 1; the Rayleigh quotient does not
            const Vec v = rep.vectors.col(static_cast<Eigen::Index>(i));
            finite.push_back(v.dot(k * v) / v.dot(m * v));
        }
    }
    std::sort(finite.begin(), finite.end());
}

}  // namespace

EigenPair solve_eigen_pair(std::shared_ptr<const Mesh> mesh, int k, BC bc, const Tolerances& tol) {
    const int n = mesh->dim();
    if (k < 0 || k > n - 1) throw DegreeOverflow("eigenproblem needs 0 <= k <= n-1");
    const GlobalSpace w = abcfes_by_constraints(mesh, k, bc, tol).space;
    const Mat pw = p0_of(w), dw = image_of(w, DiffOp::d);
    const GlobalSpace z = conforming_dual(mesh, k + 1, swap_bc(bc));
    const Mat pz = p0_of(z), dz = image_of(z, DiffOp::delta);
    EigenPair e;
    pencil(dw.transpose() * dw, pw.transpose() * pw, tol.eig, e.primal, e.primal_zero, e.primal_infinite);
    pencil(dz.transpose() * dz, pz.transpose() * pz, tol.eig, e.dual, e.dual_zero, e.dual_infinite);
    e.match = e.primal.size() == e.dual.size();
    if (e.match) {
        for (std::size_t i = 0; i < e.primal.size(); ++i)
            e.max_relative_gap = std::max(e.max_relative_gap, std::abs(e.primal[i] - e.dual[i]) / std::abs(e.primal[i]));
        e.match = e.max_relative_gap < 1e-9;
    } else {
        e.max_relative_gap = INFINITY;
    }
    return e;
}

std::string scheme_name(HodgeScheme s) {
    switch (s) {
    case HodgeScheme::complete: return "complete";
    case HodgeScheme::lowest_primal: return "lowest_primal";
    case HodgeScheme::mixed_primal: return "mixed_primal";
    case HodgeScheme::mixed_dual: return "mixed_dual";
    }
    return "?";
}

HodgeScheme parse_scheme(const std::string& s) {
    for (HodgeScheme h : {HodgeScheme::complete, HodgeScheme::lowest_primal, HodgeScheme::mixed_primal,
                          HodgeScheme::mixed_dual})
        if (scheme_name(h) == s) return h;
    throw InvalidParameter("unknown scheme '" + s + "'");
}

SchemeSolution solve_hodge(std::shared_ptr<const Mesh> mesh, int k, BC bc, const SourceField& f, HodgeScheme scheme,
                           const Tolerances& tol) {
    const int n = mesh->dim();
    if (k < 0 || k > n) throw DegreeOverflow("Hodge degree out of [0, n]");
    const BC dual_bc = swap_bc(bc);
    const int fk = p0_count(*mesh, k);
    SchemeSolution s;
    s.scheme = scheme_name(scheme);
    s.k = k;
    s.bc = bc;
    s.pf = project_p0(*mesh, k, f);

    // W^abc Lambda^{k-1} and W* Lambda^{k+1} pieces shared by several schemes.
    auto sigma_space = [&]() { return abcfes_by_constraints(mesh, k - 1, bc, tol).space; };
    auto zeta_space = [&]() { return conforming_dual(mesh, k + 1, dual_bc); };

    Solved r;
    switch (scheme) {
    case HodgeScheme::complete: {
        const Mat hb = harmonic_basis(mesh, k, HarmonicFlavor::abc, bc, tol);
        Mat pz = empty_space(p0_count(*mesh, k + 1)), dz = empty_space(fk);
        if (k + 1 <= n) {
            const GlobalSpace z = zeta_space();
            pz = p0_of(z);
            dz = image_of(z, DiffOp::delta);
        }
        Mat ps = empty_space(p0_count(*mesh, k - 1)), ds = empty_space(fk);
        if (k >= 1) {
            const GlobalSpace sg = sigma_space();
            ps = p0_of(sg);
            ds = image_of(sg, DiffOp::d);
        }
        BlockSystem sys({fk, static_cast<int>(dz.cols()), static_cast<int>(ds.cols()), static_cast<int>(hb.cols())});
        sys.set_sym(0, 1, -dz);
        sys.set_sym(0, 2, -ds);
        sys.set_sym(0, 3, -hb);
        sys.set(1, 1, pz.transpose() * pz);
        sys.set(2, 2, ps.transpose() * ps);
        sys.rhs[0] = -s.pf;
        r = dense_solve(sys.matrix(), sys.vector(), true);
        const std::vector<Vec> x = sys.split(r.x);
        put(s.unknowns, "omega", x[0]);
        put(s.unknowns, "zeta", x[1]);
        put(s.unknowns, "sigma", x[2]);
        put(s.unknowns, "theta", x[3]);
        put(s.derived, "P_omega", x[0]);
        put(s.derived, "P_zeta", pz * x[1]);
        put(s.derived, "delta_zeta", dz * x[1]);
        put(s.derived, "P_sigma", ps * x[2]);
        put(s.derived, "d_sigma", ds * x[2]);
        put(s.derived, "theta", hb * x[3]);
        break;
    }
    case HodgeScheme::mixed_primal: {
        const Mat hb = harmonic_basis(mesh, k, HarmonicFlavor::abc, bc, tol);
        const GlobalSpace w = abcfes_by_constraints(mesh, k, bc, tol).space;
        const Mat pw = p0_of(w), dw = image_of(w, DiffOp::d);
        Mat ps = empty_space(p0_count(*mesh, k - 1)), ds = empty_space(fk);
        if (k >= 1) {
            const GlobalSpace sg = sigma_space();
            ps = p0_of(sg);
            ds = image_of(sg, DiffOp::d);
        }
        BlockSystem sys({w.dofs(), static_cast<int>(ds.cols()), static_cast<int>(hb.cols())});
        sys.set(0, 0, dw.transpose() * dw);
        sys.set_sym(0, 1, pw.transpose() * ds);
        sys.set_sym(0, 2, pw.transpose() * hb);
        sys.set(1, 1, -ps.transpose() * ps);
        sys.rhs[0] = pw.transpose() * s.pf;
        r = dense_solve(sys.matrix(), sys.vector(), true);
        const std::vector<Vec> x = sys.split(r.x);
        put(s.unknowns, "omega", x[0]);
        put(s.unknowns, "sigma", x[1]);
        put(s.unknowns, "theta", x[2]);
        put(s.derived, "P_omega", pw * x[0]);
        put(s.derived, "d_omega", dw * x[0]);
        put(s.derived, "P_sigma", ps * x[1]);
        put(s.derived, "d_sigma", ds * x[1]);
        put(s.derived, "theta", hb * x[2]);
        break;
    }
    case HodgeScheme::mixed_dual: {
        const Mat hd = harmonic_basis(mesh, k, HarmonicFlavor::dual_conforming, dual_bc, tol);
        const Mat ha = harmonic_basis(mesh, k, HarmonicFlavor::abc, bc, tol);
        if (hd.cols() != ha.cols())
            throw AssemblyError("harmonic multiplier has dimension " + std::to_string(hd.cols()) +
                                " but the complex gives " + std::to_string(ha.cols()));
        const GlobalSpace w = conforming_dual(mesh, k, dual_bc);
        const Mat pw = p0_of(w), dw = image_of(w, DiffOp::delta);
        Mat pz = empty_space(p0_count(*mesh, k + 1)), dz = empty_space(fk);
        if (k + 1 <= n) {
            const GlobalSpace z = zeta_space();
            pz = p0_of(z);
            dz = image_of(z, DiffOp::delta);
        }
        BlockSystem sys({w.dofs(), static_cast<int>(dz.cols()), static_cast<int>(hd.cols())});
        sys.set(0, 0, dw.transpose() * dw);
        sys.set_sym(0, 1, pw.transpose() * dz);
        sys.set_sym(0, 2, pw.transpose() * hd);
        sys.set(1, 1, -pz.transpose() * pz);
        sys.rhs[0] = pw.transpose() * s.pf;
        r = dense_solve(sys.matrix(), sys.vector(), true);
        const std::vector<Vec> x = sys.split(r.x);
        put(s.unknowns, "omega", x[0]);
        put(s.unknowns, "zeta", x[1]);
        put(s.unknowns, "theta", x[2]);
        put(s.derived, "P_omega", pw * x[0]);
        put(s.derived, "delta_omega", dw * x[0]);
        put(s.derived, "P_zeta", pz * x[1]);
        put(s.derived, "delta_zeta", dz * x[1]);
        put(s.derived, "theta", hd * x[2]);
        break;
    }
    case HodgeScheme::lowest_primal: {
        const Mat hb = harmonic_basis(mesh, k, HarmonicFlavor::abc, bc, tol);
        const GlobalSpace v = vm_space(mesh, k, bc, tol);
        const Mat pv = p0_of(v), dv = image_of(v, DiffOp::d), sv = image_of(v, DiffOp::delta);
        BlockSystem sys({v.dofs(), static_cast<int>(hb.cols())});
        sys.set(0, 0, dv.transpose() * dv + sv.transpose() * sv);
        sys.set_sym(0, 1, pv.transpose() * hb);
        sys.rhs[0] = pv.transpose() * (s.pf - hb * (hb.transpose() * s.pf));
        r = dense_solve(sys.matrix(), sys.vector(), true);
        const std::vector<Vec> x = sys.split(r.x);
        put(s.unknowns, "omega", x[0]);
        put(s.unknowns, "multiplier", x[1]);
        put(s.derived, "P_omega", pv * x[0]);
        put(s.derived, "d_omega", dv * x[0]);
        put(s.derived, "delta_omega", sv * x[0]);
        put(s.derived, "harmonic_residual", hb.transpose() * (pv * x[0]));
        break;
    }
    }
    s.residual = r.residual;
    s.condition = r.condition;
    return s;
}

EquivalenceReport verify_hodge_equivalences(const std::vector<SchemeSolution>& sols) {
    if (sols.size() != 4) throw InvalidParameter("expected the four Hodge solutions");
    const SchemeSolution& c = sols[0];
    const SchemeSolution& l = sols[1];
    const SchemeSolution& p = sols[2];
    const SchemeSolution& d = sols[3];
    for (const auto* s : {&l, &p, &d})
        if (s->k != c.k || s->bc != c.bc || s->pf.size() != c.pf.size())
            throw InvalidParameter("solutions are from different problems");
    EquivalenceReport r;
    const double sc = c.pf.norm();
    auto add = [&](const std::string& name, const Vec& a, const Vec& b) { r.residuals.emplace_back(name, rel(a, b, sc)); };
    const Vec& pf = c.pf;
    const Vec& thc = c.image("theta");

    add("cd: theta_d = theta_c", d.image("theta"), thc);
    add("cd: zeta_d = zeta_c", d.unknown("zeta"), c.unknown("zeta"));
    add("cd: P omega_d = omega_c", d.image("P_omega"), c.unknown("omega"));
    add("cd: delta omega_d = P sigma_c", d.image("delta_omega"), c.image("P_sigma"));
    add("cd: delta zeta_d = Pf - d sigma_c - theta_c", d.image("delta_zeta"), Vec(pf - c.image("d_sigma") - thc));

    add("cp: theta_p = theta_c", p.image("theta"), thc);
    add("cp: sigma_p = sigma_c", p.unknown("sigma"), c.unknown("sigma"));
    add("cp: P omega_p = omega_c", p.image("P_omega"), c.unknown("omega"));
    add("cp: d omega_p = P zeta_c", p.image("d_omega"), c.image("P_zeta"));
    add("cp: d sigma_p = Pf - delta zeta_c - theta_c", p.image("d_sigma"), Vec(pf - c.image("delta_zeta") - thc));

    add("pd: theta_d = theta_p", d.image("theta"), p.image("theta"));
    add("pd: P zeta_d = d omega_p", d.image("P_zeta"), p.image("d_omega"));
    add("pd: P omega_d = P omega_p", d.image("P_omega"), p.image("P_omega"));
    add("pd: delta omega_d = P sigma_p", d.image("delta_omega"), p.image("P_sigma"));
    add("pd: delta zeta_d + d sigma_p = Pf - theta_c", Vec(d.image("delta_zeta") + p.image("d_sigma")), Vec(pf - thc));

    add("lp: d omega = P zeta_c", l.image("d_omega"), c.image("P_zeta"));
    add("lp: delta omega = P sigma_c", l.image("delta_omega"), c.image("P_sigma"));
    add("lp: P omega = omega_c", l.image("P_omega"), c.unknown("omega"));
    r.pass = r.worst() < 1e-9;
    return r;
}

double energy_error(std::shared_ptr<const Mesh> mesh, int k, BC bc, const SchemeSolution& primal,
                    const FormField& du, const Tolerances& tol) {
    (void)bc;
    (void)tol;
    const LayoutPtr layout = make_layout(mesh, k, LocalFamily::primal);
    const Vec& w = primal.image("omega_broken");
    const QuadRule rule = simplex_rule(mesh->dim(), 8);
    std::vector<double> err(mesh->num_cells(), 0.0);
    parallel_for(mesh->num_cells(), [&](int c) {
        const LocalSpace& ls = layout->local[c];
        PolyForm wc(mesh->dim(), k);
        for (int i = 0; i < ls.dim(); ++i) wc += ls.basis[i] * w(layout->offset[c] + i);
        const PolyForm dwc = exterior_derivative(wc);
        const auto& vs = ls.cell.vertices();
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
            Vec x = Vec::Zero(mesh->dim());
            for (std::size_t i = 0; i < vs.size(); ++i) x += rule.bary[q](i) * vs[i];
            err[c] += rule.weights[q] * ls.cell.volume() * (dwc.evaluate(x) - du(x)).squaredNorm();
        }
    });
    double total = 0.0;
    for (double e : err) total += e;
    return std::sqrt(total);
}

}  // namespace padfeec
