#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/mesh.hpp"

namespace fraclap::pipeline {

struct ReactionConfig {
    /// model: mu φ_p(t) − kappa |t|^{q−2} t;  power: mu φ_p(t);  zero: f ≡ 0.
    std::string family = "model";
    std::optional<double> mu;
    std::optional<double> mu_scale;
    /// lambda1 or lambda2; used with mu_scale.
    std::string mu_reference = "lambda1";
    double kappa = 1.0;
    double q = 4.0;
    /// Growth constant; defaults to the family's exact bound when absent.
    std::optional<double> c0;

    friend bool operator==(const ReactionConfig&, const ReactionConfig&) = default;
};

struct SolverConfig {
    double tol = 1e-10;
    int max_iterations = 500;
    std::size_t images = 21;
    std::size_t eigen_images = 21;
    int string_max_iterations = 100000;
    int retries = 4;
    std::size_t oracle_starts = 64;
    std::size_t oracle_n = 6;
    bool oracle = false;
    std::uint64_t seed = 1;

    friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct OutputConfig {
    std::string directory = "runs";
    std::string run_id;
    bool csv = true;
    bool dat = true;

    friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct ExperimentConfig {
    ProblemParams problem{.p = 2.5, .s = 0.3, .a = -1.0, .b = 1.0, .n = 64, .c0 = 1.0, .q = 4.0};
    ReactionConfig reaction;
    SolverConfig solver;
    OutputConfig output;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

    /// Problem parameters with q taken from the reaction section.
    ProblemParams problem_for(std::size_t n) const {
        ProblemParams p = problem;
        p.n = n;
        p.q = reaction.q;
        if (reaction.c0) p.c0 = *reaction.c0;
        return p;
    }

    void validate() const {
        problem_for(problem.n).validate();
        const auto& r = reaction;
        if (r.family != "model" && r.family != "power" && r.family != "zero") {
            throw ParameterError("reaction.family: unknown family '" + r.family + "' (expected model, power or zero)");
        }
        if (r.family != "zero") {
            if (r.mu.has_value() == r.mu_scale.has_value()) {
                throw ParameterError("reaction: give exactly one of mu and mu_scale");
            }
            if (r.mu_reference != "lambda1" && r.mu_reference != "lambda2") {
                throw ParameterError("reaction.mu_reference must be lambda1 or lambda2, got '" + r.mu_reference + "'");
            }
            if (r.mu_scale && !(*r.mu_scale > 0.0)) throw ParameterError("reaction.mu_scale must be positive");
        }
        if (r.family == "model" && !(r.kappa > 0.0)) throw ParameterError("reaction.kappa must be positive");
        if (!(r.q > 1.0)) throw ParameterError("reaction.q must exceed 1");
        if (r.c0 && !(*r.c0 > 0.0)) throw ParameterError("reaction.c0 must be positive");
        if (!(solver.tol > 0.0)) throw ParameterError("solver.tol must be positive");
        if (solver.max_iterations < 1) throw ParameterError("solver.max_iterations must be positive");
        if (solver.images < 7) throw ParameterError("solver.images must be at least 7");
        if (solver.eigen_images < 5) throw ParameterError("solver.eigen_images must be at least 5");
        if (solver.string_max_iterations < 1) throw ParameterError("solver.string_max_iterations must be positive");
        if (solver.retries < 0) throw ParameterError("solver.retries must be nonnegative");
        if (solver.oracle_starts < 1) throw ParameterError("solver.oracle_starts must be positive");
        if (solver.oracle_n < 1 || solver.oracle_n > 8) throw ParameterError("solver.oracle_n must lie in [1, 8]");
        if (output.directory.empty()) throw ParameterError("output.directory must not be empty");
        if (output.run_id.find('/') != std::string::npos) throw ParameterError("output.run_id must not contain '/'");
    }
};

namespace detail {

inline double parse_real(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw ParameterError(key + ": expected a number, got '" + text + "'");
    return v;
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || text.front() == '-') {
        throw ParameterError(key + ": expected a nonnegative integer, got '" + text + "'");
    }
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ParameterError(key + ": expected true or false, got '" + text + "'");
}

inline std::string real_text(double v) { return fmt::format("{:.17g}", v); }

}  // namespace detail

/// Parses the sectioned key = value format. Unknown sections and keys are errors.
inline ExperimentConfig parse_config(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParameterError(std::string("config: ") + e.what());
    }
    ExperimentConfig cfg;
    const std::set<std::string> sections{"problem", "reaction", "solver", "output"};
    for (const auto& [name, section] : tree) {
        if (!sections.count(name)) throw ParameterError("config: unknown section [" + name + "]");
        if (section.empty() && !section.data().empty()) throw ParameterError("config: key '" + name + "' outside any section");
        for (const auto& [key, node] : section) {
            const std::string full = name + "." + key;
            const std::string& v = node.data();
            using detail::parse_bool;
            using detail::parse_real;
            using detail::parse_unsigned;
            if (name == "problem") {
                if (key == "p") cfg.problem.p = parse_real(full, v);
                else if (key == "s") cfg.problem.s = parse_real(full, v);
                else if (key == "a") cfg.problem.a = parse_real(full, v);
                else if (key == "b") cfg.problem.b = parse_real(full, v);
                else if (key == "n") cfg.problem.n = parse_unsigned(full, v);
                else throw ParameterError("config: unknown key " + full);
            } else if (name == "reaction") {
                if (key == "family") cfg.reaction.family = v;
                else if (key == "mu") cfg.reaction.mu = parse_real(full, v);
                else if (key == "mu_scale") cfg.reaction.mu_scale = parse_real(full, v);
                else if (key == "mu_reference") cfg.reaction.mu_reference = v;
                else if (key == "kappa") cfg.reaction.kappa = parse_real(full, v);
                else if (key == "q") cfg.reaction.q = parse_real(full, v);
                else if (key == "c0") cfg.reaction.c0 = parse_real(full, v);
                else throw ParameterError("config: unknown key " + full);
            } else if (name == "solver") {
                if (key == "tol") cfg.solver.tol = parse_real(full, v);
                else if (key == "max_iterations") cfg.solver.max_iterations = static_cast<int>(parse_unsigned(full, v));
                else if (key == "images") cfg.solver.images = parse_unsigned(full, v);
                else if (key == "eigen_images") cfg.solver.eigen_images = parse_unsigned(full, v);
                else if (key == "string_max_iterations") cfg.solver.string_max_iterations = static_cast<int>(parse_unsigned(full, v));
                else if (key == "retries") cfg.solver.retries = static_cast<int>(parse_unsigned(full, v));
                else if (key == "oracle_starts") cfg.solver.oracle_starts = parse_unsigned(full, v);
                else if (key == "oracle_n") cfg.solver.oracle_n = parse_unsigned(full, v);
                else if (key == "oracle") cfg.solver.oracle = parse_bool(full, v);
                else if (key == "seed") cfg.solver.seed = parse_unsigned(full, v);
                else throw ParameterError("config: unknown key " + full);
            } else if (name == "output") {
                if (key == "directory") cfg.output.directory = v;
                else if (key == "run_id") cfg.output.run_id = v;
                else if (key == "csv") cfg.output.csv = parse_bool(full, v);
                else if (key == "dat") cfg.output.dat = parse_bool(full, v);
                else throw ParameterError("config: unknown key " + full);
            }
        }
    }
    cfg.validate();
    return cfg;
}

inline ExperimentConfig parse_config(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open " + path);
    return parse_config(in);
}

/// Serializes every field; parse_config(to_ini(c)) == c.
inline std::string to_ini(const ExperimentConfig& c) {
    using detail::real_text;
    std::string out;
    out += "[problem]\n";
    out += "p = " + real_text(c.problem.p) + "\n";
    out += "s = " + real_text(c.problem.s) + "\n";
    out += "a = " + real_text(c.problem.a) + "\n";
    out += "b = " + real_text(c.problem.b) + "\n";
    out += "n = " + std::to_string(c.problem.n) + "\n";
    out += "\n[reaction]\n";
    out += "family = " + c.reaction.family + "\n";
    if (c.reaction.mu) out += "mu = " + real_text(*c.reaction.mu) + "\n";
    if (c.reaction.mu_scale) out += "mu_scale = " + real_text(*c.reaction.mu_scale) + "\n";
    out += "mu_reference = " + c.reaction.mu_reference + "\n";
    out += "kappa = " + real_text(c.reaction.kappa) + "\n";
    out += "q = " + real_text(c.reaction.q) + "\n";
    if (c.reaction.c0) out += "c0 = " + real_text(*c.reaction.c0) + "\n";
    out += "\n[solver]\n";
    out += "tol = " + real_text(c.solver.tol) + "\n";
    out += "max_iterations = " + std::to_string(c.solver.max_iterations) + "\n";
    out += "images = " + std::to_string(c.solver.images) + "\n";
    out += "eigen_images = " + std::to_string(c.solver.eigen_images) + "\n";
    out += "string_max_iterations = " + std::to_string(c.solver.string_max_iterations) + "\n";
    out += "retries = " + std::to_string(c.solver.retries) + "\n";
    out += "oracle_starts = " + std::to_string(c.solver.oracle_starts) + "\n";
    out += "oracle_n = " + std::to_string(c.solver.oracle_n) + "\n";
    out += std::string("oracle = ") + (c.solver.oracle ? "true" : "false") + "\n";
    out += "seed = " + std::to_string(c.solver.seed) + "\n";
    out += "\n[output]\n";
    out += "directory = " + c.output.directory + "\n";
    if (!c.output.run_id.empty()) out += "run_id = " + c.output.run_id + "\n";
    out += std::string("csv = ") + (c.output.csv ? "true" : "false") + "\n";
    out += std::string("dat = ") + (c.output.dat ? "true" : "false") + "\n";
    return out;
}

}  // namespace fraclap::pipeline
