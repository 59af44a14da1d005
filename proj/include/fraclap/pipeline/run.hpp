#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/lattice.hpp"
#include "fraclap/mesh.hpp"
#include "fraclap/pipeline/config.hpp"
#include "fraclap/pipeline/report.hpp"
#include "fraclap/reaction.hpp"
#include "fraclap/spectral.hpp"
#include "fraclap/variational.hpp"

namespace fraclap::pipeline {

struct ResolvedReaction {
    std::string family;
    double mu = 0.0;
    double kappa = 0.0;
    double q = 0.0;
    double c0 = 1.0;
    Reaction reaction;
};

/// Builds the reaction from its config and family parameters.
inline ResolvedReaction make_reaction(const std::string& family, double mu, double kappa, double p, double q, std::optional<double> c0) {
    ResolvedReaction out{family, mu, kappa, q, 1.0, {}};
    if (family == "model") {
        const ModelReaction m{.mu = mu, .kappa = kappa, .p = p, .q = q};
        out.reaction = m.reaction();
        out.c0 = c0 ? *c0 : m.growth_constant();
    } else if (family == "power") {
        out.kappa = 0.0;
        out.reaction = power_reaction(mu, p);
        out.c0 = c0 ? *c0 : std::max(std::abs(mu), 1e-300);
    } else if (family == "zero") {
        out.mu = 0.0;
        out.kappa = 0.0;
        out.reaction = zero_reaction();
        out.c0 = c0 ? *c0 : 1.0;
    } else {
        throw ParameterError("unknown reaction family '" + family + "'");
    }
    return out;
}

inline ResolvedReaction resolve_reaction(const ExperimentConfig& cfg, double lambda1, std::optional<double> lambda2) {
    const auto& rc = cfg.reaction;
    double mu = 0.0;
    if (rc.family != "zero") {
        if (rc.mu) {
            mu = *rc.mu;
        } else if (rc.mu_reference == "lambda1") {
            mu = *rc.mu_scale * lambda1;
        } else {
            if (!lambda2) throw InternalError("resolve_reaction: lambda2 required but not computed");
            mu = *rc.mu_scale * *lambda2;
        }
    }
    return make_reaction(rc.family, mu, rc.kappa, cfg.problem.p, rc.q, rc.c0);
}

inline Profile make_profile(const Mesh& mesh, std::string name, const GridFunction& u, const Functional* f,
                            std::optional<double> eigenvalue = std::nullopt) {
    Profile p;
    p.name = std::move(name);
    p.x = mesh.nodes();
    p.dist_s = mesh.dist_s();
    p.u = u;
    if (eigenvalue) {
        p.kind = "eigen";
        p.residual_inf = eigen_residual(mesh, Weight::uniform(mesh.size()), u, *eigenvalue).sup_norm();
        p.energy = energy(mesh, u);
    } else {
        p.residual_inf = f->residual(u).sup_norm();
        p.energy = f->value(u);
    }
    p.classification = to_string(sign_classify(u, classification_tol(u)));
    const WeightedSup w = weighted_sup(mesh, u);
    p.min_ratio = w.min_ratio;
    p.weighted_norm = w.norm;
    return p;
}

inline Profile empty_profile(const Mesh& mesh, std::string name) {
    Profile p;
    p.name = std::move(name);
    p.x = mesh.nodes();
    p.dist_s = mesh.dist_s();
    return p;
}

namespace detail {

/// Tracks the active stage and its wall-clock time.
class StageClock {
public:
    explicit StageClock(RunReport& rep) : rep_(rep) {}
    ~StageClock() { stop(); }

    void enter(std::string name) {
        stop();
        name_ = std::move(name);
        start_ = std::chrono::steady_clock::now();
        running_ = true;
    }
    const std::string& current() const noexcept { return name_; }

    void stop() {
        if (!running_) return;
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        rep_.timings.emplace_back(name_, secs);
        running_ = false;
    }

private:
    RunReport& rep_;
    std::string name_ = "setup";
    std::chrono::steady_clock::time_point start_;
    bool running_ = false;
};

template <typename Body>
void guarded(RunReport& rep, StageClock& clock, Body&& body) {
    try {
        body();
    } catch (const Error& e) {
        rep.failure = StageFailure{clock.current(), e.kind(), e.what()};
    } catch (const std::exception& e) {
        rep.failure = StageFailure{clock.current(), ErrorKind::internal, e.what()};
    }
    clock.stop();
}

inline bool is_odd(const Reaction& r, std::size_t nodes) {
    for (std::size_t i = 0; i < nodes; ++i) {
        for (double t : {1e-3, 0.1, 0.7, 1.0, 3.0, 10.0}) {
            if (r.value(i, -t) != -r.value(i, t)) return false;
        }
    }
    return true;
}

inline bool is_symmetric(const Mesh& mesh) {
    const auto& d = mesh.dist();
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (std::abs(d[i] - d[d.size() - 1 - i]) > 1e-14 * (mesh.params().b - mesh.params().a)) return false;
    }
    return true;
}

inline std::vector<double> to_array(const GridFunction& u) { return u.to_vector(); }

}  // namespace detail

/// Intermediate products shared by the verbs.
struct Stages {
    std::optional<Mesh> mesh;
    std::optional<EigenResult> principal;
    std::optional<SecondEigenResult> second;
    std::optional<ResolvedReaction> reaction;
    std::optional<ExtremalResult> plus;
    std::optional<ExtremalResult> minus;
    std::optional<NodalResult> nodal;
};

inline ExtremalOptions extremal_options(const ExperimentConfig& cfg) {
    ExtremalOptions o;
    o.minimize.tol = std::min(cfg.solver.tol, 1e-10);
    o.minimize.max_iterations = cfg.solver.max_iterations;
    o.lattice.solve = o.minimize;
    return o;
}

inline NodalOptions nodal_options(const ExperimentConfig& cfg) {
    NodalOptions o;
    o.images = cfg.solver.images;
    o.retries = cfg.solver.retries;
    o.seed = cfg.solver.seed;
    o.mountain_pass.string.max_iterations = cfg.solver.string_max_iterations;
    o.mountain_pass.newton.tol = std::min(cfg.solver.tol, 1e-10);
    o.mountain_pass.newton.max_iterations = cfg.solver.max_iterations;
    return o;
}

inline StringOptions eigen_string_options(const ExperimentConfig& cfg) {
    StringOptions o;
    o.images = cfg.solver.eigen_images;
    o.max_iterations = cfg.solver.string_max_iterations;
    o.seed = cfg.solver.seed;
    return o;
}

namespace detail {

inline void stage_mesh(RunReport& rep, Stages& st, const ExperimentConfig& cfg, std::size_t n) {
    const ProblemParams pp = cfg.problem_for(n);
    st.mesh.emplace(pp);
    for (const auto& w : pp.warnings()) rep.warnings.push_back(w);
    rep.results["mesh"] = {{"n", n}, {"h", st.mesh->spacing()}, {"a", pp.a}, {"b", pp.b}, {"p", pp.p}, {"s", pp.s}};
}

inline void stage_spectral(RunReport& rep, Stages& st, const ExperimentConfig& cfg, bool need_second, StageClock& clock) {
    clock.enter("principal_eigenpair");
    st.principal = principal_eigenpair(*st.mesh);
    const auto& e1 = *st.principal;
    json spectral{{"lambda1", e1.lambda}, {"lambda1_residual", e1.residual}, {"normalization", e1.normalization}};
    rep.profiles.push_back(make_profile(*st.mesh, "u1", e1.u, nullptr, e1.lambda));
    if (need_second) {
        clock.enter("second_eigenvalue");
        st.second = second_eigenvalue_minimax(*st.mesh, e1, cfg.solver.eigen_images, 1e-8, eigen_string_options(cfg));
        const auto& e2 = *st.second;
        spectral["lambda2"] = e2.lambda2;
        spectral["lambda2_polished"] = e2.polished;
        spectral["lambda2_residual"] = e2.residual;
        spectral["lambda2_iterations"] = e2.iterations;
        Series s{"lambda2_path", "state", "rayleigh_quotient", {}};
        const Weight one = Weight::uniform(st.mesh->size());
        for (std::size_t k = 0; k < e2.path.size(); ++k) {
            s.points.emplace_back(static_cast<double>(k), rayleigh_quotient(*st.mesh, one, e2.path[k]));
        }
        rep.series.push_back(std::move(s));
        rep.profiles.push_back(make_profile(*st.mesh, "u2", e2.path[e2.max_index], nullptr, e2.lambda2));
    }
    rep.results["spectral"] = std::move(spectral);
}

inline void stage_reaction(RunReport& rep, Stages& st, const ExperimentConfig& cfg, StageClock& clock) {
    clock.enter("reaction");
    const std::optional<double> l2 = st.second ? std::optional<double>(st.second->lambda2) : std::nullopt;
    st.reaction = resolve_reaction(cfg, st.principal->lambda, l2);
    const auto& rr = *st.reaction;
    ProblemParams pp = st.mesh->params();
    pp.c0 = rr.c0;
    pp.q = rr.q;
    const GrowthReport g = growth_check(rr.reaction, pp, 41);
    rep.results["reaction"] = {{"family", rr.family}, {"mu", rr.mu}, {"kappa", rr.kappa}, {"q", rr.q}, {"c0", rr.c0},
                               {"growth_ratio", g.max_ratio}, {"growth_passed", g.passed},
                               {"mu_over_lambda1", rr.mu / st.principal->lambda}};
    if (st.second) rep.results["reaction"]["mu_over_lambda2"] = rr.mu / st.second->lambda2;
    if (!g.passed) {
        throw ParameterError("reaction violates the growth bound |f| <= c0(1+|t|^(q-1)) (ratio " + std::to_string(g.max_ratio) +
                             " at t = " + std::to_string(g.worst_t) + ")");
    }
}

inline void stage_extremal(RunReport& rep, Stages& st, const ExperimentConfig& cfg, StageClock& clock) {
    const Mesh& mesh = *st.mesh;
    const Reaction& r = st.reaction->reaction;
    const Functional f(mesh, r);
    const ExtremalOptions opts = extremal_options(cfg);

    clock.enter("smallest_positive");
    rep.profiles.push_back(empty_profile(mesh, "u_plus"));
    st.plus = smallest_positive(mesh, r, *st.principal, opts);
    rep.profiles.back() = make_profile(mesh, "u_plus", st.plus->report.u, &f);
    for (const auto& w : st.plus->warnings) rep.warnings.push_back("smallest_positive: " + w);

    clock.enter("biggest_negative");
    rep.profiles.push_back(empty_profile(mesh, "u_minus"));
    st.minus = biggest_negative(mesh, r, *st.principal, opts);
    rep.profiles.back() = make_profile(mesh, "u_minus", st.minus->report.u, &f);
    for (const auto& w : st.minus->warnings) rep.warnings.push_back("biggest_negative: " + w);

    const auto& up = *st.plus;
    const auto& um = *st.minus;
    json ex;
    ex["u_plus"] = {{"classification", to_string(up.report.classification)}, {"cone_min_ratio", up.cone.min_ratio},
                    {"cone_interior", up.cone.in_cone_interior()}, {"u_hat_energy", up.u_hat_energy},
                    {"eps_sub", up.eps_sub}, {"eps0", up.eps0}, {"sweeps", up.sweeps}};
    ex["u_minus"] = {{"classification", to_string(um.report.classification)}, {"cone_min_ratio", um.cone.min_ratio},
                     {"cone_interior", um.cone.in_cone_interior()}, {"u_hat_energy", um.u_hat_energy},
                     {"eps_sub", um.eps_sub}, {"eps0", um.eps0}, {"sweeps", um.sweeps}};
    const bool symmetric = is_odd(r, mesh.size()) && is_symmetric(mesh);
    ex["odd_symmetric_problem"] = symmetric;
    ex["symmetry_error"] = sup_distance(um.report.u, -up.report.u);
    if (symmetric) ex["symmetry_holds"] = sup_distance(um.report.u, -up.report.u) <= 1e-8;
    rep.results["extremal"] = std::move(ex);
}

inline void stage_nodal(RunReport& rep, Stages& st, const ExperimentConfig& cfg, StageClock& clock) {
    const Mesh& mesh = *st.mesh;
    const Reaction& r = st.reaction->reaction;
    clock.enter("nodal_solution");
    if (!(st.reaction->mu > st.second->lambda2)) {
        rep.warnings.push_back("mu = " + std::to_string(st.reaction->mu) + " does not exceed the lambda2 estimate " +
                               std::to_string(st.second->lambda2) + "; a nodal solution is not guaranteed");
    }
    rep.profiles.push_back(empty_profile(mesh, "u_nodal"));
    try {
        st.nodal = nodal_solution(mesh, r, st.plus->report, st.minus->report, nodal_options(cfg), &*st.second);
    } catch (const NotFoundError& e) {
        rep.results["nodal"] = {{"status", "not_found"}, {"message", e.what()}};
        throw;
    }
    const Functional f(mesh, r);
    const auto& nd = *st.nodal;
    rep.profiles.back() = make_profile(mesh, "u_nodal", nd.report.u, &f);
    for (const auto& w : nd.warnings) rep.warnings.push_back("nodal_solution: " + w);
    json j;
    j["status"] = "found";
    j["classification"] = to_string(nd.report.classification);
    j["ordering"] = {{"above_u_minus", nd.report.ordering->above_lower}, {"below_u_plus", nd.report.ordering->below_upper}};
    j["level"] = nd.level;
    j["energy_plus"] = nd.energy_plus;
    j["energy_minus"] = nd.energy_minus;
    j["level_above_endpoints"] = nd.level >= std::max(nd.energy_plus, nd.energy_minus);
    j["distinct_from_cast"] = !same_point(nd.report.u, mesh.zeros()) && !same_point(nd.report.u, st.plus->report.u) &&
                              !same_point(nd.report.u, st.minus->report.u);
    j["attempts"] = nd.attempts;
    j["retry_log"] = nd.retry_log;
    if (nd.diagnostic) {
        j["spectral_path_diagnostic"] = {{"eps", nd.diagnostic->eps}, {"max", nd.diagnostic->max_value},
                                         {"negative", nd.diagnostic->negative}};
    }
    rep.results["nodal"] = std::move(j);
    Series s{"mountain_pass_path", "state", "energy", {}};
    for (std::size_t k = 0; k < nd.path.energies.size(); ++k) s.points.emplace_back(static_cast<double>(k), nd.path.energies[k]);
    rep.series.push_back(std::move(s));
}

}  // namespace detail

/// Cross-check on a tiny mesh: extremal pipeline, optional nodal search, and brute-force enumeration.
inline json oracle_crosscheck(const ExperimentConfig& cfg, std::size_t n, std::vector<std::string>& warnings) {
    if (n > 8) throw ParameterError("oracle mesh must have at most 8 nodes, got " + std::to_string(n));
    const Mesh mesh(cfg.problem_for(n));
    const EigenResult e1 = principal_eigenpair(mesh);
    const bool want_nodal = cfg.reaction.mu_reference == "lambda2";
    std::optional<SecondEigenResult> e2;
    if (want_nodal || cfg.reaction.mu_scale) {
        e2 = second_eigenvalue_minimax(mesh, e1, cfg.solver.eigen_images, 1e-8, eigen_string_options(cfg));
    }
    const ResolvedReaction rr = resolve_reaction(cfg, e1.lambda, e2 ? std::optional<double>(e2->lambda2) : std::nullopt);
    const Reaction& r = rr.reaction;
    const ExtremalOptions eopts = extremal_options(cfg);

    json out;
    out["n"] = n;
    out["lambda1"] = e1.lambda;
    if (e2) out["lambda2"] = e2->lambda2;
    out["mu"] = rr.mu;

    const ExtremalResult up = smallest_positive(mesh, r, e1, eopts);
    const ExtremalResult um = biggest_negative(mesh, r, e1, eopts);

    // Box [−M, M] with M a constant supersolution dominating the extremal pair.
    const double m_sup = constant_supersolution(mesh, r, 0.0, 1.0);
    double big = std::max({m_sup, up.report.u.sup_norm(), um.report.u.sup_norm()});
    while (!check_supersolution(mesh, r, mesh.constant(big), 0.0).passed ||
           !check_subsolution(mesh, r, mesh.constant(-big), 0.0).passed) {
        big *= 2.0;
    }
    const IntervalPair box{mesh.constant(-big), mesh.constant(big)};
    EnumerateOptions oopts;
    oopts.seed = cfg.solver.seed;
    const SolutionSet set = enumerate_solutions(mesh, r, box, cfg.solver.oracle_starts, oopts);
    out["box"] = big;
    out["starts"] = cfg.solver.oracle_starts;
    out["complete"] = set.complete_flag;
    json members = json::array();
    int positive = 0, negative = 0, nodal = 0, zero = 0;
    for (const auto& m : set.members) {
        members.push_back({{"classification", to_string(m.classification)}, {"energy", m.energy}, {"residual_inf", m.residual_inf},
                           {"values", detail::to_array(m.u)}});
        switch (m.classification) {
            case SignClass::positive: ++positive; break;
            case SignClass::negative: ++negative; break;
            case SignClass::nodal: ++nodal; break;
            case SignClass::zero: ++zero; break;
        }
    }
    out["counts"] = {{"total", set.members.size()}, {"positive", positive}, {"negative", negative}, {"nodal", nodal}, {"zero", zero}};
    out["members"] = std::move(members);

    // Extremality of the lattice iteration on the box.
    const LatticeOptions lopts = eopts.lattice;
    const SolveReport lo = minimal_solution(mesh, r, box, lopts);
    const SolveReport hi = maximal_solution(mesh, r, box, lopts);
    const double min_gap = set.members.empty() ? INFINITY : sup_distance(lo.u, pointwise_min(set));
    const double max_gap = set.members.empty() ? INFINITY : sup_distance(hi.u, pointwise_max(set));
    out["minimal_vs_oracle"] = min_gap;
    out["maximal_vs_oracle"] = max_gap;

    // No positive member lies below u₊ anywhere (beyond 1e-6); dually for u₋.
    double below_plus = 0.0, above_minus = 0.0;
    bool plus_in_set = false, minus_in_set = false;
    for (const auto& m : set.members) {
        if (m.classification == SignClass::positive) {
            for (std::size_t i = 0; i < n; ++i) below_plus = std::max(below_plus, up.report.u[i] - m.u[i]);
            plus_in_set = plus_in_set || same_point(m.u, up.report.u);
        }
        if (m.classification == SignClass::negative) {
            for (std::size_t i = 0; i < n; ++i) above_minus = std::max(above_minus, m.u[i] - um.report.u[i]);
            minus_in_set = minus_in_set || same_point(m.u, um.report.u);
        }
    }
    out["u_plus"] = {{"values", detail::to_array(up.report.u)}, {"in_set", plus_in_set}, {"max_excess_over_positive_members", below_plus},
                     {"minimal", plus_in_set && below_plus <= 1e-6}};
    out["u_minus"] = {{"values", detail::to_array(um.report.u)}, {"in_set", minus_in_set}, {"max_excess_over_negative_members", above_minus},
                      {"maximal", minus_in_set && above_minus <= 1e-6}};
    out["symmetry_error"] = sup_distance(um.report.u, -up.report.u);

    if (want_nodal) {
        try {
            NodalOptions nopts = nodal_options(cfg);
            const NodalResult nd = nodal_solution(mesh, r, up.report, um.report, nopts, &*e2);
            bool in_set = false;
            for (const auto& m : set.members) in_set = in_set || same_point(m.u, nd.report.u);
            out["nodal"] = {{"status", "found"}, {"values", detail::to_array(nd.report.u)}, {"in_set", in_set},
                            {"level", nd.level}};
        } catch (const NotFoundError& e) {
            out["nodal"] = {{"status", "not_found"}, {"message", e.what()}};
            warnings.push_back("oracle: nodal search on the oracle mesh failed");
        }
    }
    if (!set.complete_flag) warnings.push_back("oracle: doubling the start count found new members; coverage is not complete");
    return out;
}

inline RunReport start_report(const std::string& verb, const ExperimentConfig& cfg, std::size_t n) {
    RunReport rep;
    rep.verb = verb;
    rep.config = cfg;
    rep.run_id = default_run_id(verb, cfg, n);
    return rep;
}

inline RunReport run_eig(const ExperimentConfig& cfg) {
    cfg.validate();
    RunReport rep = start_report("eig", cfg, cfg.problem.n);
    Stages st;
    detail::StageClock clock(rep);
    detail::guarded(rep, clock, [&] {
        clock.enter("mesh");
        detail::stage_mesh(rep, st, cfg, cfg.problem.n);
        detail::stage_spectral(rep, st, cfg, true, clock);
    });
    return rep;
}

inline RunReport run_extremal(const ExperimentConfig& cfg) {
    cfg.validate();
    RunReport rep = start_report("solve-extremal", cfg, cfg.problem.n);
    Stages st;
    detail::StageClock clock(rep);
    detail::guarded(rep, clock, [&] {
        clock.enter("mesh");
        detail::stage_mesh(rep, st, cfg, cfg.problem.n);
        detail::stage_spectral(rep, st, cfg, cfg.reaction.mu_reference == "lambda2" && cfg.reaction.mu_scale.has_value(), clock);
        detail::stage_reaction(rep, st, cfg, clock);
        detail::stage_extremal(rep, st, cfg, clock);
        if (cfg.solver.oracle) {
            clock.enter("oracle");
            rep.results["oracle"] = oracle_crosscheck(cfg, cfg.solver.oracle_n, rep.warnings);
        }
    });
    return rep;
}

inline RunReport run_nodal(const ExperimentConfig& cfg) {
    cfg.validate();
    RunReport rep = start_report("solve-nodal", cfg, cfg.problem.n);
    Stages st;
    detail::StageClock clock(rep);
    detail::guarded(rep, clock, [&] {
        clock.enter("mesh");
        detail::stage_mesh(rep, st, cfg, cfg.problem.n);
        detail::stage_spectral(rep, st, cfg, true, clock);
        detail::stage_reaction(rep, st, cfg, clock);
        detail::stage_extremal(rep, st, cfg, clock);
        detail::stage_nodal(rep, st, cfg, clock);
        if (cfg.solver.oracle) {
            clock.enter("oracle");
            rep.results["oracle"] = oracle_crosscheck(cfg, cfg.solver.oracle_n, rep.warnings);
        }
    });
    return rep;
}

inline RunReport run_oracle(const ExperimentConfig& cfg) {
    cfg.validate();
    RunReport rep = start_report("oracle", cfg, cfg.solver.oracle_n);
    detail::StageClock clock(rep);
    detail::guarded(rep, clock, [&] {
        clock.enter("oracle");
        const Mesh mesh(cfg.problem_for(cfg.solver.oracle_n));
        rep.results["oracle"] = oracle_crosscheck(cfg, cfg.solver.oracle_n, rep.warnings);
        const json& o = rep.results["oracle"];
        const Functional f(mesh, resolve_reaction(cfg, o["lambda1"].get<double>(),
                                                  o.contains("lambda2") ? std::optional<double>(o["lambda2"].get<double>()) : std::nullopt)
                                     .reaction);
        for (const char* name : {"u_plus", "u_minus"}) {
            rep.profiles.push_back(make_profile(mesh, name, GridFunction::from(o[name]["values"].get<std::vector<double>>()), &f));
        }
        if (o.contains("nodal") && o["nodal"]["status"] == "found") {
            rep.profiles.push_back(make_profile(mesh, "u_nodal", GridFunction::from(o["nodal"]["values"].get<std::vector<double>>()), &f));
        }
    });
    return rep;
}

// ---------------------------------------------------------------------------------------------
// Self-verification of a stored run

struct VerifyCheck {
    std::string name;
    double stored = 0.0;
    double recomputed = 0.0;
    bool passed = false;
};

struct VerifyResult {
    std::vector<VerifyCheck> checks;
    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
    }
};

/// Reloads profiles from a run directory and recomputes every stored residual and energy.
inline VerifyResult verify_run(const std::filesystem::path& dir, double tol = 1e-12) {
    std::ifstream in(dir / "report.json");
    if (!in) throw IoError("verify: cannot open " + (dir / "report.json").string());
    json report;
    try {
        report = json::parse(in);
    } catch (const json::exception& e) {
        throw IoError(std::string("verify: malformed report.json: ") + e.what());
    }
    const ExperimentConfig cfg = parse_config(report.at("config_ini").get<std::string>());
    const json& results = report.at("results");
    VerifyResult out;
    if (!results.contains("mesh") && !results.contains("oracle")) return out;
    const std::size_t n = results.contains("mesh") ? results["mesh"]["n"].get<std::size_t>() : results["oracle"]["n"].get<std::size_t>();
    const Mesh mesh(cfg.problem_for(n));

    std::optional<Functional> f;
    double lambda1 = 0.0;
    std::optional<double> lambda2;
    if (results.contains("spectral")) {
        lambda1 = results["spectral"]["lambda1"].get<double>();
        if (results["spectral"].contains("lambda2")) lambda2 = results["spectral"]["lambda2"].get<double>();
    }
    if (results.contains("reaction")) {
        const json& rj = results["reaction"];
        f.emplace(mesh, make_reaction(rj["family"].get<std::string>(), rj["mu"].get<double>(), rj["kappa"].get<double>(), cfg.problem.p,
                                      rj["q"].get<double>(), rj["c0"].get<double>())
                            .reaction);
    } else if (results.contains("oracle")) {
        const json& o = results["oracle"];
        f.emplace(mesh, make_reaction(cfg.reaction.family, o["mu"].get<double>(), cfg.reaction.kappa, cfg.problem.p, cfg.reaction.q,
                                      cfg.reaction.c0)
                            .reaction);
    }

    for (const auto& pj : report.at("profiles")) {
        if (!pj["present"].get<bool>()) continue;
        const std::string name = pj["name"].get<std::string>();
        const CsvProfile csv = read_profile_csv(dir / pj["file"].get<std::string>());
        if (csv.value.size() != mesh.size()) throw IoError("verify: " + name + " has " + std::to_string(csv.value.size()) + " rows, expected " + std::to_string(mesh.size()));
        double xerr = 0.0;
        for (std::size_t i = 0; i < mesh.size(); ++i) xerr = std::max(xerr, std::abs(csv.x[i] - mesh.nodes()[i]));
        out.checks.push_back({name + ".nodes", 0.0, xerr, xerr <= 1e-14});
        const GridFunction u = GridFunction::from(csv.value);
        Profile p;
        if (pj["kind"] == "eigen") {
            const double lam = name == "u2" && lambda2 ? *lambda2 : lambda1;
            p = make_profile(mesh, name, u, nullptr, lam);
        } else {
            if (!f) throw IoError("verify: report lacks the reaction needed to check " + name);
            p = make_profile(mesh, name, u, &*f);
        }
        const double sr = pj["residual_inf"].get<double>();
        const double se = pj["energy"].get<double>();
        out.checks.push_back({name + ".residual_inf", sr, p.residual_inf, std::abs(sr - p.residual_inf) <= tol});
        out.checks.push_back({name + ".energy", se, p.energy, std::abs(se - p.energy) <= tol * (1.0 + std::abs(se))});
        out.checks.push_back({name + ".classification", 0.0, 0.0, pj["classification"].get<std::string>() == p.classification});
    }
    return out;
}

}  // namespace fraclap::pipeline
