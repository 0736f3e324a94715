#include "padfeec/pipeline.hpp"

#include "padfeec/analysis.hpp"
#include "padfeec/errors.hpp"
#include "padfeec/gallery.hpp"
#include "padfeec/interp.hpp"
#include "padfeec/solvers.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>

namespace padfeec {

const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> c = {
        "mesh gen",         "mesh info",     "space build",   "verify base-pair", "verify decomposition",
        "verify duality",   "verify complex", "verify interp", "solve source",     "solve eigen",
        "solve hodge",      "suite all"};
    return c;
}

void RunConfig::validate() const {
    if (std::find(known_commands().begin(), known_commands().end(), command) == known_commands().end())
        throw InvalidParameter("unknown command '" + command + "'");
    if (!(tol.rank > 0 && tol.eig > 0 && tol.identity > 0 && tol.containment > 0))
        throw InvalidParameter("tolerances must be positive");
    if (k < -1) throw InvalidParameter("k must be >= 0 (or -1 for all)");
    if (bc != "none" && bc != "homogeneous" && bc != "h0" && bc != "both")
        throw InvalidParameter("bc must be none, homogeneous or both");
    if (samples < 1) throw InvalidParameter("samples must be positive");
    parse_format(format);
    if (scheme != "all") parse_scheme(scheme);
}

nlohmann::ordered_json RunConfig::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["mesh"] = mesh;
    j["k"] = k;
    j["bc"] = bc;
    j["scheme"] = scheme;
    j["space"] = space;
    j["source"] = source;
    j["tolerances"] = {{"rank", tol.rank}, {"eig", tol.eig}, {"identity", tol.identity}, {"containment", tol.containment}};
    j["output"] = output;
    j["mesh_out"] = mesh_out;
    j["format"] = format;
    j["samples"] = samples;
    j["levels"] = levels;
    j["check_equivalence"] = check_equivalence;
    j["timings"] = timings;
    return j;
}

void RunConfig::merge_json(const nlohmann::ordered_json& j) {
    auto take = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    take("command", command);
    take("mesh", mesh);
    take("k", k);
    take("bc", bc);
    take("scheme", scheme);
    take("space", space);
    take("source", source);
    take("output", output);
    take("mesh_out", mesh_out);
    take("format", format);
    take("samples", samples);
    take("levels", levels);
    take("check_equivalence", check_equivalence);
    take("timings", timings);
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        if (t.contains("rank")) tol.rank = t.at("rank").get<double>();
        if (t.contains("eig")) tol.eig = t.at("eig").get<double>();
        if (t.contains("identity")) tol.identity = t.at("identity").get<double>();
        if (t.contains("containment")) tol.containment = t.at("containment").get<double>();
    }
}

namespace {

using MeshPtr = std::shared_ptr<const Mesh>;

struct Runner {
    const RunConfig& cfg;
    Report& rep;
    MeshPtr mesh;
    int n = 0;

    std::vector<int> degrees(int lo, int hi) const {
        std::vector<int> out;
        if (cfg.k >= 0) {
            if (cfg.k >= lo && cfg.k <= hi) out.push_back(cfg.k);
        } else {
            for (int k = lo; k <= hi; ++k) out.push_back(k);
        }
        return out;
    }

    std::vector<BC> bcs() const {
        if (cfg.bc == "both") return {BC::none, BC::homogeneous};
        return {parse_bc(cfg.bc)};
    }

    // Runs one check; library errors become a failed record with the diagnostic.
    void attempt(const std::string& name, nlohmann::ordered_json inputs, const std::function<void(Record&)>& fn) {
        Record r;
        r.name = name;
        r.inputs = std::move(inputs);
        try {
            fn(r);
        } catch (const Error& e) {
            r.verdict = Verdict::fail;
            r.reason = e.what();
        } catch (const std::exception& e) {
            r.verdict = Verdict::fail;
            r.reason = std::string("internal: ") + e.what();
        }
        rep.records.push_back(std::move(r));
    }

    void skip(const std::string& name, const std::string& why) {
        Record r;
        r.name = name;
        r.verdict = Verdict::skipped;
        r.reason = why;
        rep.records.push_back(std::move(r));
    }

    nlohmann::ordered_json in(int k, const std::string& bc = "") const {
        nlohmann::ordered_json j;
        j["mesh"] = cfg.mesh;
        j["k"] = k;
        if (!bc.empty()) j["bc"] = bc;
        return j;
    }

    static std::string tag(const std::string& what, int k, BC bc) {
        return what + " k=" + std::to_string(k) + " bc=" + bc_name(bc);
    }

    SourceField source(int k) const {
        SourceField f;
        const std::string& s = cfg.source;
        if (s == "zero") return f;
        if (s.rfind("const:", 0) == 0) {
            const double c = std::stod(s.substr(6));
            PolyForm p(n, k);
            for (const auto& a : multi_indices(n, k)) p += PolyForm::dx(n, a, c);
            f.poly = [p](int) { return p; };
            return f;
        }
        if (s.rfind("random:", 0) == 0) {
            const std::uint64_t seed = std::stoull(s.substr(7));
            const PolyForm p = random_form(n, k, 2, seed * 31 + static_cast<std::uint64_t>(k));
            f.poly = [p](int) { return p; };
            return f;
        }
        if (s == "cos") {
            if (n != 2 || k != 0) throw InvalidParameter("source cos is the scalar field on the unit square");
            f.func = [](const Vec& x) {
                const double pi = M_PI;
                return Vec::Constant(1, (2 * pi * pi + 1) * std::cos(pi * x(0)) * std::cos(pi * x(1)));
            };
            return f;
        }
        throw InvalidParameter("unknown source '" + s + "'");
    }

    static void from_decomposition(Record& r, const DecompositionReport& d) {
        for (const auto& [key, v] : d.dims) r.num("dim " + key, v);
        r.num("orthogonality_residual", d.orthogonality_residual);
        r.num("identity_angle", d.identity_angle);
        r.verdict = d.pass ? Verdict::pass : Verdict::fail;
        if (!d.pass) r.reason = d.dims_match ? "residual above tolerance" : "dimensions do not add up";
        if (!d.note.empty() && r.reason.empty() && d.note.find("differ") != std::string::npos) r.reason = d.note;
    }

    // --- commands -------------------------------------------------------

    void mesh_gen() {
        attempt("mesh gen", in(-1), [&](Record& r) {
            r.num("dim", n).num("vertices", mesh->num_vertices()).num("cells", mesh->num_cells());
            if (!cfg.mesh_out.empty()) {
                std::ofstream f(cfg.mesh_out);
                if (!f) throw InvalidParameter("cannot write " + cfg.mesh_out);
                f << mesh->to_json() << "\n";
                r.inputs["mesh_out"] = cfg.mesh_out;
            }
        });
    }

    void mesh_info() {
        attempt("mesh info", in(-1), [&](Record& r) {
            const MeshQuality q = mesh->quality();
            r.num("dim", n).num("vertices", mesh->num_vertices()).num("cells", mesh->num_cells());
            for (int k = 0; k <= n; ++k) r.num("simplices_" + std::to_string(k), mesh->subsimplices(k).size());
            r.num("h_max", q.h_max).num("min_angle_deg", q.min_angle_deg).num("max_aspect", q.max_aspect);
            const auto bad = mesh->boundary_vertices_without_interior_neighbor();
            r.num("boundary_vertices_without_interior_neighbor", static_cast<double>(bad.size()));
            r.num("standing_hypothesis", bad.empty() ? 1 : 0);
        });
    }

    void space_build() {
        for (int k : degrees(0, n))
            for (BC bc : bcs())
                attempt(tag("space " + cfg.space, k, bc), in(k, bc_name(bc)), [&](Record& r) {
                    if (cfg.space == "abc") {
                        const AbcResult a = abcfes_by_constraints(mesh, k, bc, cfg.tol);
                        r.num("dim", a.space.dofs()).num("broken_dim", a.space.broken_dim());
                        r.num("constraint_rank", a.constraints.rank);
                        if (k < n) {
                            const BasisAtlas atlas = abcfes_local_basis(mesh, k, bc, cfg.tol);
                            const double ang = max_principal_angle(Subspace(atlas.to_broken()), Subspace(a.space.coords()),
                                                                   Metric::identity(a.space.broken_dim()));
                            r.num("type_i", atlas.count(BasisCategory::type_i));
                            r.num("type_ii", atlas.count(BasisCategory::type_ii));
                            r.num("route_angle", ang);
                            if (ang >= 1e-9) {
                                r.verdict = Verdict::fail;
                                r.reason = "local basis and constraint route differ";
                            }
                        }
                    } else if (cfg.space == "conforming") {
                        const GlobalSpace s = conforming_whitney(mesh, k, bc);
                        r.num("dim", s.dofs()).num("trace_defect", trace_continuity_defect(s));
                    } else if (cfg.space == "dual") {
                        const GlobalSpace s = conforming_dual(mesh, k, bc);
                        r.num("dim", s.dofs()).num("broken_dim", s.broken_dim());
                    } else if (cfg.space == "vm") {
                        const GlobalSpace s = vm_space(mesh, k, bc, cfg.tol);
                        r.num("dim", s.dofs()).num("broken_dim", s.broken_dim());
                    } else if (cfg.space == "broken") {
                        const GlobalSpace s = broken_space(mesh, k, Variant::primal);
                        r.num("dim", s.dofs());
                    } else {
                        throw InvalidParameter("unknown space '" + cfg.space + "' (abc, conforming, dual, vm, broken)");
                    }
                });
    }

    void base_pair_on(const MeshPtr& m, const std::string& label) {
        const int dim = m->dim();
        for (int k : degrees(0, dim - 1)) {
            auto inputs = in(k);
            inputs["mesh"] = label;
            attempt("base-pair k=" + std::to_string(k) + " mesh=" + label, inputs, [&](Record& r) {
                const BasePairReport b = whitney_base_pair_report(*m, k, cfg.tol);
                r.num("h", m->quality().h_max);
                r.num("alpha", b.alpha).num("beta", b.beta).num("kappa", b.kappa).num("varpi", b.varpi);
                r.num("chi", b.chi).num("eps", b.eps);
                r.num("uM_dim", b.uM_dim).num("uN_dim", b.uN_dim);
                r.num("icr_tilde", b.icr_tilde).num("icr_under", b.icr_under);
                const PairData g = whitney_pair_data(m, k);
                if (g.dim_p() <= 600) r.num("alpha_global", base_pair_report(g, cfg.tol).alpha);
                const bool unit = std::abs(b.alpha - 1) <= 1e-10 && std::abs(b.beta - 1) <= 1e-10;
                if (!b.assumptions_ok() || !unit || b.uM_dim || b.uN_dim) {
                    r.verdict = Verdict::fail;
                    r.reason = "Whitney constants differ from 1 or an assumption failed";
                }
            });
        }
    }

    void base_pair() {
        if (cfg.levels.empty()) return base_pair_on(mesh, cfg.mesh);
        const std::string family = cfg.mesh.substr(0, cfg.mesh.find(':'));
        for (int lv : cfg.levels) {
            const std::string src = family + ":" + std::to_string(lv);
            MeshPtr m;
            try {
                m = std::make_shared<const Mesh>(mesh_from_source(src));
            } catch (const Error& e) {
                attempt("base-pair mesh=" + src, in(-1), [&](Record&) { throw; });
                continue;
            }
            base_pair_on(m, src);
        }
    }

    void decomposition() {
        for (BC bc : bcs())
            for (int k : degrees(0, n))
                attempt(tag("helmholtz", k, bc), in(k, bc_name(bc)),
                        [&](Record& r) { from_decomposition(r, helmholtz_check(mesh, k, bc, cfg.tol)); });
        for (BC bc : bcs())
            for (int k : degrees(0, n))
                attempt(tag("hodge", k, bc), in(k, bc_name(bc)),
                        [&](Record& r) { from_decomposition(r, hodge_check(mesh, k, bc, cfg.tol)); });
        for (int k : degrees(0, n))
            attempt("pl-duality k=" + std::to_string(k), in(k),
                    [&](Record& r) { from_decomposition(r, pl_duality_check(mesh, k, cfg.tol)); });
    }

    void duality() {
        for (int k : degrees(0, n - 1)) {
            attempt("horizontal-duality k=" + std::to_string(k), in(k),
                    [&](Record& r) { from_decomposition(r, horizontal_duality_check(mesh, k, cfg.tol)); });
            for (BC bc : bcs())
                attempt(tag("partial-adjoint", k, bc), in(k, bc_name(bc)), [&](Record& r) {
                    const OperatorPair op = whitney_operator_pair(mesh, k, bc, cfg.tol);
                    const GlobalSpace expect = conforming_dual(mesh, k + 1, swap_bc(bc));
                    const double ang = op.adjoint_domain.dim() == expect.dofs()
                                           ? max_principal_angle(op.adjoint_domain, Subspace(expect.coords()),
                                                                 Metric::identity(expect.broken_dim()))
                                           : M_PI / 2;
                    const BasePairReport b = whitney_base_pair_report(*mesh, k, cfg.tol);
                    const CrtCheck c = quantified_crt_check(op, b, cfg.tol);
                    r.num("adjoint_dim", op.adjoint_domain.dim()).num("conforming_dual_dim", expect.dofs());
                    r.num("adjoint_angle", ang).num("roundtrip_angle", op.roundtrip_angle);
                    r.num("pairing_residual", op.pairing_residual);
                    r.num("icr_primal", c.icr_primal).num("icr_adjoint", c.icr_adjoint);
                    r.num("bound_primal", c.bound_primal).num("bound_adjoint", c.bound_adjoint);
                    if (ang >= cfg.tol.identity || op.roundtrip_angle >= cfg.tol.identity || !c.bound_ok) {
                        r.verdict = Verdict::fail;
                        r.reason = c.bound_ok ? "adjoint domain differs from the conforming dual" : "closed-range bound violated";
                    }
                });
        }
    }

    void complex() {
        for (BC bc : bcs())
            attempt("complex bc=" + bc_name(bc), in(-1, bc_name(bc)),
                    [&](Record& r) { from_decomposition(r, complex_check(mesh, bc, cfg.tol)); });
    }

    void interp() {
        for (int k : degrees(0, n - 1)) {
            attempt("interp k=" + std::to_string(k), in(k), [&](Record& r) {
                const int ns = cfg.samples;
                std::vector<CellField> fields;
                for (int s = 0; s < ns; ++s) {
                    const PolyForm p = random_form(n, k, 2, 1000 + 97 * static_cast<std::uint64_t>(s) + k);
                    fields.push_back([p](int) { return p; });
                }
                double comm = 0.0, cons = 0.0;
                const ConstraintSet cs = abcfes_by_constraints(mesh, k, BC::none, cfg.tol).constraints;
                for (const auto& f : fields) {
                    comm = std::max(comm, commute_check(mesh, k, f, cfg.tol));
                    cons = std::max(cons, constraint_residual(cs, interpolate_global(mesh, k, f, cfg.tol)));
                }
                // projectivity on a random broken Whitney vector
                const LayoutPtr lay = make_layout(mesh, k, LocalFamily::primal);
                std::mt19937_64 rng(7 + k);
                std::uniform_real_distribution<double> u(-1.0, 1.0);
                Vec v(lay->dim);
                for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = u(rng);
                const Vec iv = interpolate_global(
                    mesh, k,
                    [&](int c) { return local_form(lay->local[c], v.segment(lay->offset[c], lay->local_dim(c))); },
                    cfg.tol);
                const double proj = (iv - v).cwiseAbs().maxCoeff();
                const StabilityReport st = stability_report(mesh, k, fields, cfg.tol);
                r.num("commute_residual", comm).num("constraint_residual", cons).num("projectivity", proj);
                r.num("energy_ratio", st.energy_ratio).num("energy_bound", st.energy_bound);
                r.num("full_ratio", st.full_ratio).num("full_bound", st.full_bound).num("gamma", st.gamma);
                if (n == 2 && k == 0) {
                    double cr = 0.0;
                    const PolyForm q = random_form(2, 0, 2, 4242);
                    for (int c = 0; c < mesh->num_cells(); ++c) {
                        const CellGeometry cell = cell_geometry(*mesh, c);
                        const LocalInterpolator s = whitney_interpolator(cell, 0, cfg.tol);
                        const PolyForm a = local_form(s.primal, interpolate_local(s, q));
                        const PolyForm b = local_form(gallery_2d(cell, LocalTag::CR), cr_closed_form(cell, q));
                        cr = std::max(cr, (a - b).max_abs_coeff());
                    }
                    r.num("cr_closed_form", cr);
                    if (cr >= 1e-12) r.reason = "closed form mismatch";
                }
                if (comm >= 1e-11 || cons >= 1e-11 || proj >= 1e-12 || !st.ok || !r.reason.empty()) {
                    r.verdict = Verdict::fail;
                    if (r.reason.empty()) r.reason = "interpolation property above tolerance";
                }
            });
        }
    }

    void source() {
        for (int k : degrees(0, n - 1))
            for (BC bc : bcs())
                attempt(tag("source", k, bc), in(k, bc_name(bc)), [&](Record& r) {
                    const SourceField f = source(k);
                    const SchemeSolution p = solve_source_primal(mesh, k, bc, f, cfg.tol);
                    const SchemeSolution d = solve_source_dual(mesh, k, bc, f, cfg.tol);
                    const EquivalenceReport e = verify_source_equivalence(p, d);
                    r.num("primal_residual", p.residual).num("dual_residual", d.residual);
                    for (const auto& [name, v] : e.residuals) r.num(name, v);
                    if (!e.pass) {
                        r.verdict = Verdict::fail;
                        r.reason = "source equivalence residual above 1e-9";
                    }
                });
    }

    void eigen() {
        for (int k : degrees(0, n - 1))
            for (BC bc : bcs())
                attempt(tag("eigen", k, bc), in(k, bc_name(bc)), [&](Record& r) {
                    const EigenPair e = solve_eigen_pair(mesh, k, bc, cfg.tol);
                    r.num("nonzero_primal", e.primal.size()).num("nonzero_dual", e.dual.size());
                    r.num("zero_primal", e.primal_zero).num("zero_dual", e.dual_zero);
                    if (!e.primal.empty()) r.num("lambda_min", e.primal.front()).num("lambda_max", e.primal.back());
                    r.num("max_relative_gap", e.max_relative_gap);
                    if (!e.match) {
                        r.verdict = Verdict::fail;
                        r.reason = "nonzero spectra differ";
                    }
                });
    }

    void hodge() {
        const std::vector<HodgeScheme> all = {HodgeScheme::complete, HodgeScheme::lowest_primal,
                                              HodgeScheme::mixed_primal, HodgeScheme::mixed_dual};
        const bool every = cfg.scheme == "all";
        for (int k : degrees(0, n))
            for (BC bc : bcs()) {
                if (every && cfg.check_equivalence) {
                    attempt(tag("hodge-equivalence", k, bc), in(k, bc_name(bc)), [&](Record& r) {
                        const SourceField f = source(k);
                        std::vector<SchemeSolution> sols;
                        for (HodgeScheme s : all) sols.push_back(solve_hodge(mesh, k, bc, f, s, cfg.tol));
                        const EquivalenceReport e = verify_hodge_equivalences(sols);
                        r.num("theta_norm", sols[0].image("theta").norm());
                        for (const auto& [name, v] : e.residuals) r.num(name, v);
                        if (!e.pass) {
                            r.verdict = Verdict::fail;
                            r.reason = "scheme equivalence residual above 1e-9";
                        }
                    });
                    continue;
                }
                for (HodgeScheme s : all) {
                    if (!every && scheme_name(s) != cfg.scheme) continue;
                    attempt(tag("hodge " + scheme_name(s), k, bc), in(k, bc_name(bc)), [&](Record& r) {
                        const SchemeSolution sol = solve_hodge(mesh, k, bc, source(k), s, cfg.tol);
                        r.num("residual", sol.residual).num("condition", sol.condition);
                        for (const auto& [name, v] : sol.unknowns) r.num("norm " + name, v.norm());
                    });
                }
            }
    }
};

template <class F>
void timed(Report& rep, const std::string& phase, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    rep.phases.emplace_back(phase, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

}  // namespace

Report run(const RunConfig& config) {
    Report rep;
    rep.config = config.to_json();
    rep.emit_timings = config.timings;
    config.validate();

    MeshPtr mesh;
    timed(rep, "mesh", [&] {
        try {
            mesh = std::make_shared<const Mesh>(mesh_from_source(config.mesh));
        } catch (const Error& e) {
            Record r;
            r.name = "mesh";
            r.inputs["mesh"] = config.mesh;
            r.verdict = Verdict::fail;
            r.reason = e.what();
            rep.records.push_back(r);
        }
    });
    if (!mesh) return rep;
    if (config.k > mesh->dim()) throw InvalidParameter("k exceeds the mesh dimension");

    Runner run{config, rep, mesh, mesh->dim()};
    const std::string& c = config.command;
    auto phase = [&](const std::string& name, auto f) { timed(rep, name, f); };
    if (c == "mesh gen") phase("mesh gen", [&] { run.mesh_gen(); });
    if (c == "mesh info") phase("mesh info", [&] { run.mesh_info(); });
    if (c == "space build") phase("space build", [&] { run.space_build(); });
    if (c == "verify base-pair" || c == "suite all") phase("base-pair", [&] { run.base_pair(); });
    if (c == "verify decomposition" || c == "suite all") phase("decomposition", [&] { run.decomposition(); });
    if (c == "verify duality" || c == "suite all") phase("duality", [&] { run.duality(); });
    if (c == "verify complex" || c == "suite all") phase("complex", [&] { run.complex(); });
    if (c == "verify interp" || c == "suite all") phase("interp", [&] { run.interp(); });
    if (c == "solve source" || c == "suite all") phase("source", [&] { run.source(); });
    if (c == "solve eigen" || c == "suite all") phase("eigen", [&] { run.eigen(); });
    if (c == "solve hodge") phase("hodge", [&] { run.hodge(); });
    if (c == "suite all") {
        RunConfig eq = config;
        eq.scheme = "all";
        eq.check_equivalence = true;
        Runner r2{eq, rep, mesh, mesh->dim()};
        phase("hodge", [&] { r2.hodge(); });
    }
    return rep;
}

}  // namespace padfeec
