// Command-line driver: fraclap <verb> <config|run-dir> [--seed N] [--out DIR] [--n N] [--quiet]

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "fraclap/pipeline/config.hpp"
#include "fraclap/pipeline/report.hpp"
#include "fraclap/pipeline/run.hpp"

namespace fp = fraclap::pipeline;

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> n;
    bool quiet = false;
};

fp::ExperimentConfig load(const std::string& path, const Overrides& o, bool oracle_verb) {
    fp::ExperimentConfig cfg = fp::load_config(path);
    if (o.seed) cfg.solver.seed = *o.seed;
    if (o.out) cfg.output.directory = *o.out;
    if (o.n) {
        if (oracle_verb) cfg.solver.oracle_n = *o.n;
        else cfg.problem.n = *o.n;
    }
    cfg.validate();
    return cfg;
}

void summarize(const fp::RunReport& rep, const std::filesystem::path& dir) {
    const auto& res = rep.results;
    if (res.contains("spectral")) {
        const auto& s = res["spectral"];
        fmt::print("lambda1 = {:.12g}\n", s["lambda1"].get<double>());
        if (s.contains("lambda2")) fmt::print("lambda2 <= {:.12g}{}\n", s["lambda2"].get<double>(), s["lambda2_polished"].get<bool>() ? " (eigen-polished)" : "");
    }
    if (res.contains("reaction")) fmt::print("mu = {:.12g}\n", res["reaction"]["mu"].get<double>());
    for (const auto& p : rep.profiles) {
        if (!p.present()) continue;
        fmt::print("{:<8} {:<9} residual {:.3e}  energy {:.10g}  min u/d^s {:.6g}\n", p.name, p.classification, p.residual_inf, p.energy,
                   p.min_ratio);
    }
    if (res.contains("nodal") && res["nodal"]["status"] == "found") {
        fmt::print("mountain-pass level {:.10g} (attempts {})\n", res["nodal"]["level"].get<double>(), res["nodal"]["attempts"].get<int>());
    }
    if (res.contains("oracle")) {
        const auto& o = res["oracle"];
        fmt::print("oracle n={} members {} complete {}\n", o["n"].get<std::size_t>(), o["counts"]["total"].get<std::size_t>(),
                   o["complete"].get<bool>());
    }
    fmt::print("wrote {}\n", dir.string());
}

int run_verb(const std::string& verb, const std::string& path, const Overrides& o) {
    const fp::ExperimentConfig cfg = load(path, o, verb == "oracle");
    fp::RunReport rep;
    if (verb == "eig") rep = fp::run_eig(cfg);
    else if (verb == "solve-extremal") rep = fp::run_extremal(cfg);
    else if (verb == "solve-nodal") rep = fp::run_nodal(cfg);
    else rep = fp::run_oracle(cfg);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    const auto dir = fp::emit_outputs(rep, cfg.output.directory);
    if (!o.quiet) summarize(rep, dir);
    if (rep.failure) {
        std::cerr << "error in stage " << rep.failure->stage << ": " << rep.failure->message << "\n";
    }
    return rep.exit_code();
}

int run_verify(const std::string& dir, const Overrides& o) {
    const fp::VerifyResult res = fp::verify_run(dir);
    for (const auto& c : res.checks) {
        if (!o.quiet || !c.passed) {
            fmt::print("{} {:<28} stored {:.17g} recomputed {:.17g}\n", c.passed ? "ok  " : "FAIL", c.name, c.stored, c.recomputed);
        }
    }
    if (!o.quiet) fmt::print("{} checks, {}\n", res.checks.size(), res.passed() ? "all passed" : "FAILED");
    return res.passed() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Extremal and nodal solutions of fractional p-Laplacian problems on an interval"};
    app.require_subcommand(1);
    app.set_version_flag("--version", FRACLAP_VERSION);

    Overrides o;
    std::string target;
    auto add_common = [&](CLI::App* sub, const char* what) {
        sub->add_option("target", target, what)->required();
        sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { o.seed = v; }, "Override solver.seed");
        sub->add_option_function<std::string>("--out", [&](const std::string& v) { o.out = v; }, "Override output.directory");
        sub->add_option_function<std::size_t>("--n", [&](const std::size_t& v) { o.n = v; }, "Override the node count");
        sub->add_flag("--quiet", o.quiet, "Print errors only");
    };
    const std::vector<std::pair<std::string, std::string>> verbs{
        {"solve-extremal", "Principal eigenpair, smallest positive and biggest negative solutions"},
        {"solve-nodal", "Extremal stages followed by the mountain-pass nodal solution"},
        {"eig", "Principal eigenpair and the minimax estimate of lambda2"},
        {"oracle", "Brute-force enumeration cross-check on a tiny mesh"},
    };
    for (const auto& [name, help] : verbs) add_common(app.add_subcommand(name, help), "Config file");
    add_common(app.add_subcommand("verify", "Recompute stored residuals of a run directory"), "Run directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const std::string verb = app.get_subcommands().front()->get_name();
        if (verb == "verify") return run_verify(target, o);
        return run_verb(verb, target, o);
    } catch (const fraclap::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return fraclap::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
