#pragma once

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/grid_function.hpp"
#include "fraclap/mesh.hpp"
#include "fraclap/pipeline/config.hpp"

#ifndef FRACLAP_VERSION
#define FRACLAP_VERSION "0.1.0"
#endif

namespace fraclap::pipeline {

using json = nlohmann::ordered_json;

/// A stored grid function together with the claims made about it in the report.
struct Profile {
    std::string name;
    /// "eigen" (residual against λ₁ φ_p) or "solution" (residual against the reaction).
    std::string kind = "solution";
    std::vector<double> x;
    std::vector<double> dist_s;
    GridFunction u;
    double residual_inf = 0.0;
    double energy = 0.0;
    std::string classification;
    double min_ratio = 0.0;
    double weighted_norm = 0.0;

    bool present() const noexcept { return u.size() > 0; }
};

/// Two-column plot data.
struct Series {
    std::string name;
    std::string x_label;
    std::string y_label;
    std::vector<std::pair<double, double>> points;
};

struct StageFailure {
    std::string stage;
    ErrorKind kind = ErrorKind::internal;
    std::string message;
};

struct RunReport {
    std::string verb;
    std::string run_id;
    ExperimentConfig config;
    std::optional<StageFailure> failure;
    std::vector<std::string> warnings;
    json results = json::object();
    std::vector<Profile> profiles;
    std::vector<Series> series;
    std::vector<std::pair<std::string, double>> timings;

    bool ok() const noexcept { return !failure.has_value(); }
    int exit_code() const noexcept { return failure ? fraclap::exit_code(failure->kind) : 0; }

    const Profile* profile(const std::string& name) const {
        for (const auto& p : profiles) {
            if (p.name == name) return &p;
        }
        return nullptr;
    }
};

inline std::string default_run_id(const std::string& verb, const ExperimentConfig& cfg, std::size_t n) {
    if (!cfg.output.run_id.empty()) return cfg.output.run_id;
    return fmt::format("{}-n{}-seed{}", verb, n, cfg.solver.seed);
}

/// Report body; everything except "timings" is deterministic for a fixed config and seed.
inline json to_json(const RunReport& r) {
    json j;
    j["version"] = FRACLAP_VERSION;
    j["verb"] = r.verb;
    j["run_id"] = r.run_id;
    j["status"] = r.ok() ? "ok" : "error";
    if (r.failure) {
        j["error"] = {{"stage", r.failure->stage}, {"kind", to_string(r.failure->kind)}, {"message", r.failure->message}};
    }
    j["config_ini"] = to_ini(r.config);
    j["warnings"] = r.warnings;
    j["results"] = r.results;
    json profiles = json::array();
    for (const auto& p : r.profiles) {
        json e;
        e["name"] = p.name;
        e["kind"] = p.kind;
        e["file"] = p.name + ".csv";
        e["present"] = p.present();
        if (p.present()) {
            e["nodes"] = p.u.size();
            e["residual_inf"] = p.residual_inf;
            e["energy"] = p.energy;
            e["classification"] = p.classification;
            e["min_ratio"] = p.min_ratio;
            e["weighted_norm"] = p.weighted_norm;
            e["sup_norm"] = p.u.sup_norm();
        }
        profiles.push_back(std::move(e));
    }
    j["profiles"] = std::move(profiles);
    json timings = json::object();
    for (const auto& [stage, secs] : r.timings) timings[stage] = secs;
    j["timings"] = std::move(timings);
    return j;
}

inline std::string profile_csv(const Profile& p) {
    std::string out = "x,value,dist_s_ratio\n";
    for (std::size_t i = 0; i < p.u.size(); ++i) {
        out += fmt::format("{:.17g},{:.17g},{:.17g}\n", p.x[i], p.u[i], p.u[i] / p.dist_s[i]);
    }
    return out;
}

inline std::string profile_dat(const Profile& p) {
    std::string out = "# x " + p.name + "\n";
    for (std::size_t i = 0; i < p.u.size(); ++i) out += fmt::format("{:.17g} {:.17g}\n", p.x[i], p.u[i]);
    return out;
}

inline std::string series_dat(const Series& s) {
    std::string out = "# " + s.x_label + " " + s.y_label + "\n";
    for (const auto& [x, y] : s.points) out += fmt::format("{:.17g} {:.17g}\n", x, y);
    return out;
}

struct CsvProfile {
    std::vector<double> x;
    std::vector<double> value;
    std::vector<double> ratio;
};

inline CsvProfile read_profile_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "x,value,dist_s_ratio") throw IoError(path.string() + ": unexpected CSV header");
    CsvProfile out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a, b, c;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c)) {
            throw IoError(path.string() + ": malformed row '" + line + "'");
        }
        try {
            out.x.push_back(std::stod(a));
            out.value.push_back(std::stod(b));
            out.ratio.push_back(std::stod(c));
        } catch (const std::exception&) {
            throw IoError(path.string() + ": malformed number in row '" + line + "'");
        }
    }
    return out;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace detail

/// Writes `<base>/<run-id>/` through a staging directory renamed into place. Returns the run directory.
inline std::filesystem::path emit_outputs(const RunReport& report, const std::filesystem::path& base) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(base, ec);
    if (ec) throw IoError("cannot create output directory " + base.string() + ": " + ec.message());
    const fs::path target = base / report.run_id;
    const fs::path staging = base / (".staging-" + report.run_id);
    fs::remove_all(staging, ec);
    if (!fs::create_directory(staging, ec) || ec) {
        throw IoError("cannot create staging directory in " + base.string() + (ec ? ": " + ec.message() : ""));
    }
    try {
        detail::write_file(staging / "report.json", to_json(report).dump(2) + "\n");
        detail::write_file(staging / "config.ini", to_ini(report.config));
        for (const auto& p : report.profiles) {
            if (report.config.output.csv) detail::write_file(staging / (p.name + ".csv"), profile_csv(p));
            if (report.config.output.dat) detail::write_file(staging / (p.name + ".dat"), profile_dat(p));
        }
        if (report.config.output.dat) {
            for (const auto& s : report.series) detail::write_file(staging / (s.name + ".dat"), series_dat(s));
        }
        fs::remove_all(target, ec);
        fs::rename(staging, target, ec);
        if (ec) throw IoError("cannot move run directory into place: " + ec.message());
    } catch (...) {
        fs::remove_all(staging, ec);
        throw;
    }
    return target;
}

}  // namespace fraclap::pipeline
