#include "padfeec/errors.hpp"
#include "padfeec/pipeline.hpp"
#include "padfeec/report.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>

namespace {

struct Flags {
    std::string config, mesh, bc, scheme, space, source, output, mesh_out, format;
    int k = -1, samples = 0;
    double tol_rank = 0, tol_eig = 0, tol_identity = 0;
    std::vector<int> levels;
    bool check_equivalence = false, timings = false;
};

void add_flags(CLI::App* app, Flags& f) {
    app->add_option("--config", f.config, "JSON file with RunConfig fields");
    app->add_option("--mesh", f.mesh, "box:N, hole:N, box3:N or a mesh JSON path");
    app->add_option("--k", f.k, "form degree; omit for every applicable degree");
    app->add_option("--bc", f.bc, "none, homogeneous or both");
    app->add_option("--scheme", f.scheme, "complete, lowest_primal, mixed_primal, mixed_dual or all");
    app->add_option("--space", f.space, "abc, conforming, dual, vm or broken");
    app->add_option("--source", f.source, "zero, const:<c>, random:<seed> or cos");
    app->add_option("--tol-rank", f.tol_rank, "relative rank tolerance");
    app->add_option("--tol-eig", f.tol_eig, "eigenvalue tolerance");
    app->add_option("--tol-identity", f.tol_identity, "max principal angle for identities");
    app->add_option("--output", f.output, "report path (stdout when omitted)");
    app->add_option("--mesh-out", f.mesh_out, "where mesh gen writes the mesh JSON");
    app->add_option("--format", f.format, "json or csv");
    app->add_option("--samples", f.samples, "random fields per interpolation check");
    app->add_option("--levels", f.levels, "refinement levels for base-pair tables")->delimiter(',');
    app->add_flag("--check-equivalence", f.check_equivalence, "solve all schemes and compare");
    app->add_flag("--timings", f.timings, "emit wall-clock per phase");
}

padfeec::RunConfig resolve(const std::string& command, const Flags& f, const CLI::App* leaf) {
    padfeec::RunConfig c;
    auto given = [&](const char* name) { return leaf->get_option(name)->count() > 0; };
    if (given("--config")) {
        std::ifstream in(f.config);
        if (!in) throw padfeec::InvalidParameter("cannot read config " + f.config);
        nlohmann::ordered_json j;
        try {
            j = nlohmann::ordered_json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw padfeec::InvalidParameter("config " + f.config + ": " + e.what());
        }
        c.merge_json(j);
    }
    c.command = command;
    if (given("--mesh")) c.mesh = f.mesh;
    if (given("--k")) c.k = f.k;
    if (given("--bc")) c.bc = f.bc;
    if (given("--scheme")) c.scheme = f.scheme;
    if (given("--space")) c.space = f.space;
    if (given("--source")) c.source = f.source;
    if (given("--tol-rank")) c.tol.rank = f.tol_rank;
    if (given("--tol-eig")) c.tol.eig = f.tol_eig;
    if (given("--tol-identity")) c.tol.identity = f.tol_identity;
    if (given("--output")) c.output = f.output;
    if (given("--mesh-out")) c.mesh_out = f.mesh_out;
    if (given("--format")) c.format = f.format;
    if (given("--samples")) c.samples = f.samples;
    if (given("--levels")) c.levels = f.levels;
    if (given("--check-equivalence")) c.check_equivalence = true;
    if (given("--timings")) c.timings = true;
    return c;
}

int fail(const std::string& line, int code) {
    std::cerr << "error: " << line << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Partially adjoint discretizations of exterior derivatives: build, verify, solve"};
    app.require_subcommand(1);
    app.set_version_flag("--version", padfeec::kToolVersion);

    const std::vector<std::pair<std::string, std::vector<std::string>>> tree = {
        {"mesh", {"gen", "info"}},
        {"space", {"build"}},
        {"verify", {"base-pair", "decomposition", "duality", "complex", "interp"}},
        {"solve", {"source", "eigen", "hodge"}},
        {"suite", {"all"}},
    };
    Flags flags;
    std::vector<std::pair<std::string, CLI::App*>> leaves;
    for (const auto& [group, subs] : tree) {
        CLI::App* g = app.add_subcommand(group);
        g->require_subcommand(1);
        for (const auto& s : subs) {
            CLI::App* leaf = g->add_subcommand(s);
            add_flags(leaf, flags);
            leaves.emplace_back(group + " " + s, leaf);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        for (char& ch : msg)
            if (ch == '\n') ch = ' ';
        return fail("InvalidParameter: " + msg, 2);
    }

    try {
        std::string command;
        const CLI::App* leaf = nullptr;
        for (const auto& [name, l] : leaves)
            if (l->parsed()) command = name, leaf = l;
        const padfeec::RunConfig cfg = resolve(command, flags, leaf);
        const padfeec::Report rep = padfeec::run(cfg);
        const std::string text = padfeec::emit(rep, padfeec::parse_format(cfg.format));
        if (cfg.output.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(cfg.output, std::ios::binary);
            if (!out) return fail("InvalidParameter: cannot write " + cfg.output, 2);
            out << text;
        }
        if (!rep.all_pass()) {
            for (const auto& r : rep.records)
                if (r.verdict == padfeec::Verdict::fail)
                    return fail("CheckFailed: " + r.name + (r.reason.empty() ? "" : ": " + r.reason), 1);
        }
        return 0;
    } catch (const padfeec::Error& e) {
        return fail(e.what(), 2);
    } catch (const std::exception& e) {
        return fail(std::string("Internal: ") + e.what(), 3);
    }
}
