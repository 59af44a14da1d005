#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/grid_function.hpp"
#include "fraclap/mesh.hpp"
#include "fraclap/operator.hpp"
#include "fraclap/reaction.hpp"
#include "fraclap/spectral.hpp"
#include "fraclap/variational.hpp"

namespace fraclap {

// ---------------------------------------------------------------------------------------------
// Sub- and supersolution checks

struct ResidualCheck {
    bool passed = false;
    /// Signed slack: min residual for supersolutions, −max residual for subsolutions.
    double margin = 0.0;
    std::size_t worst_node = 0;
};

/// Passes iff min_i (A(u)_i − f(x_i, u_i)) ≥ −tol.
inline ResidualCheck check_supersolution(const Mesh& mesh, const Reaction& r, const GridFunction& u, double tol) {
    require_same_size(u, mesh.size(), "check_supersolution");
    const GridFunction res = Functional(mesh, r).residual(u);
    ResidualCheck out;
    out.margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < res.size(); ++i) {
        if (res[i] < out.margin) {
            out.margin = res[i];
            out.worst_node = i;
        }
    }
    out.passed = out.margin >= -tol;
    return out;
}

/// Passes iff max_i (A(u)_i − f(x_i, u_i)) ≤ tol.
inline ResidualCheck check_subsolution(const Mesh& mesh, const Reaction& r, const GridFunction& u, double tol) {
    require_same_size(u, mesh.size(), "check_subsolution");
    const GridFunction res = Functional(mesh, r).residual(u);
    ResidualCheck out;
    out.margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < res.size(); ++i) {
        if (-res[i] < out.margin) {
            out.margin = -res[i];
            out.worst_node = i;
        }
    }
    out.passed = out.margin >= -tol;
    return out;
}

inline GridFunction meet(const GridFunction& u1, const GridFunction& u2) {
    require_same_size(u2, u1.size(), "meet");
    return GridFunction(u1.vec().cwiseMin(u2.vec()));
}

inline GridFunction join(const GridFunction& u1, const GridFunction& u2) {
    require_same_size(u2, u1.size(), "join");
    return GridFunction(u1.vec().cwiseMax(u2.vec()));
}

// ---------------------------------------------------------------------------------------------
// Intervals and solution sets

struct IntervalPair {
    GridFunction lower;
    GridFunction upper;
};

inline void require_ordered(const IntervalPair& pair, std::size_t n, const char* what) {
    require_same_size(pair.lower, n, what);
    require_same_size(pair.upper, n, what);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(pair.lower[i] <= pair.upper[i])) {
            throw ParameterError(std::string(what) + ": lower exceeds upper at node " + std::to_string(i));
        }
    }
}

/// Builds a sub-supersolution pair after checking order and both residual signs at `tol`.
inline IntervalPair make_interval_pair(const Mesh& mesh, const Reaction& r, GridFunction lower, GridFunction upper, double tol) {
    IntervalPair pair{std::move(lower), std::move(upper)};
    require_ordered(pair, mesh.size(), "make_interval_pair");
    const auto sub = check_subsolution(mesh, r, pair.lower, tol);
    if (!sub.passed) {
        throw ParameterError("make_interval_pair: lower is not a subsolution (node " + std::to_string(sub.worst_node) +
                             ", margin " + std::to_string(sub.margin) + ")");
    }
    const auto sup = check_supersolution(mesh, r, pair.upper, tol);
    if (!sup.passed) {
        throw ParameterError("make_interval_pair: upper is not a supersolution (node " + std::to_string(sup.worst_node) +
                             ", margin " + std::to_string(sup.margin) + ")");
    }
    return pair;
}

/// Smallest M on a doubling grid (starting at `start`) for which the constant M is a supersolution.
inline double constant_supersolution(const Mesh& mesh, const Reaction& r, double tol, double start = 1.0, int max_doublings = 60) {
    double m = start;
    for (int k = 0; k < max_doublings; ++k, m *= 2.0) {
        if (check_supersolution(mesh, r, mesh.constant(m), tol).passed) return m;
    }
    throw ParameterError("constant_supersolution: no constant supersolution found up to " + std::to_string(m));
}

struct SolutionSet {
    std::vector<SolveReport> members;
    bool complete_flag = false;
};

inline double containment_tol(const IntervalPair& pair) {
    return 1e-8 * (1.0 + std::max(pair.lower.sup_norm(), pair.upper.sup_norm()));
}

// ---------------------------------------------------------------------------------------------
// Interval solves and monotone iteration

struct LatticeOptions {
    MinimizeOptions solve{};
    /// Monotone iteration stops when successive iterates differ by at most tol·(1 + ‖u‖∞).
    double tol = 1e-12;
    int max_iterations = 200000;
    /// Fixed shift σ; estimated from sampled ∂f/∂t when empty.
    std::optional<double> shift;
    double shift_safety = 1.1;
    int shift_samples = 33;
    /// Allowed backwards motion between iterates (relative) before monotonicity counts as violated.
    double monotone_slack = 1e-10;
};

/// σ ≥ 0 making t ↦ f(x_i, t) + σ φ_p(t) nondecreasing on sampled points of [lower_i, upper_i].
inline double estimate_shift(const Mesh& mesh, const Reaction& r, const IntervalPair& pair, int samples, double safety) {
    const double p = mesh.p();
    double sigma = 0.0;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        for (int k = 0; k < samples; ++k) {
            const double w = samples == 1 ? 0.5 : static_cast<double>(k) / static_cast<double>(samples - 1);
            const double t = (1.0 - w) * pair.lower[i] + w * pair.upper[i];
            const double dphi = phi_prime(t, p);
            if (!(dphi > 0.0) || !std::isfinite(dphi)) continue;
            const double need = -r.derivative(i, t) / dphi;
            if (std::isfinite(need)) sigma = std::max(sigma, need);
        }
    }
    return safety * sigma;
}

/// Minimizes the functional of f̃ (f frozen outside the interval) and checks the result lies in the interval
/// and solves the untruncated problem.
inline SolveReport interval_solve(const Mesh& mesh, const Reaction& r, const IntervalPair& pair, const LatticeOptions& opts = {},
                                  std::optional<GridFunction> start = std::nullopt) {
    require_ordered(pair, mesh.size(), "interval_solve");
    const Functional tilde(mesh, interval_truncation(r, pair.lower, pair.upper));
    SolveReport rep = minimize(tilde, start ? std::move(*start) : pair.lower, opts.solve);
    const double ctol = containment_tol(pair);
    const OrderingFlags flags = ordering_flags(rep.u, pair.lower, pair.upper, ctol);
    if (!flags.holds()) throw InternalError("interval_solve: minimizer of the truncated functional left the interval");
    SolveReport out = make_report(Functional(mesh, r), std::move(rep.u), rep.iterations);
    out.energy_history = std::move(rep.energy_history);
    out.ordering = flags;
    return out;
}

namespace detail {

inline SolveReport monotone_from_lower(const Mesh& mesh, const Reaction& r, const IntervalPair& pair, const LatticeOptions& opts) {
    const double p = mesh.p();
    const std::size_t n = mesh.size();
    const Reaction ft = interval_truncation(r, pair.lower, pair.upper);
    const double sigma = opts.shift ? *opts.shift : estimate_shift(mesh, r, pair, opts.shift_samples, opts.shift_safety);
    if (sigma < 0.0) throw ParameterError("minimal_solution: shift must be nonnegative");
    const double ctol = containment_tol(pair);

    GridFunction u = pair.lower;
    GridFunction g(n);
    int it = 0;
    bool settled = false;
    for (; it < opts.max_iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) g[i] = ft(i, u[i]) + sigma * phi(u[i], p);
        GridFunction w = solve_rhs(mesh, g, sigma, u);
        const double slack = opts.monotone_slack * (1.0 + u.sup_norm());
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] < u[i] - slack) {
                throw InternalError("minimal_solution: iterates decreased at node " + std::to_string(i) + " (step " +
                                    std::to_string(it) + ")");
            }
            if (w[i] > pair.upper[i] + ctol) {
                throw InternalError("minimal_solution: iterate exceeded the upper bound at node " + std::to_string(i));
            }
        }
        const double moved = sup_distance(w, u);
        u = std::move(w);
        if (moved <= opts.tol * (1.0 + u.sup_norm())) {
            settled = true;
            ++it;
            break;
        }
    }
    const Functional base(mesh, r);
    if (!settled) throw ConvergenceError("minimal_solution: monotone iteration did not settle", u, base.residual(u).sup_norm());

    // Newton on the truncated system removes the geometric tail of the iteration.
    try {
        MinimizeOptions nopts = opts.solve;
        nopts.tol = std::min(nopts.tol, 1e-12 * (1.0 + apply(mesh, u).sup_norm()));
        nopts.max_iterations = 30;
        SolveReport polished = newton_solve(Functional(mesh, ft), u, nopts);
        if (sup_distance(polished.u, u) <= 1e-6 * (1.0 + u.sup_norm()) &&
            base.residual(polished.u).sup_norm() < base.residual(u).sup_norm()) {
            u = std::move(polished.u);
        }
    } catch (const ConvergenceError&) {
    }

    SolveReport out = make_report(base, std::move(u), it);
    out.ordering = ordering_flags(out.u, pair.lower, pair.upper, ctol);
    return out;
}

}  // namespace detail

/// Smallest element of the solution set in [lower, upper], by shifted monotone iteration from lower.
inline SolveReport minimal_solution(const Mesh& mesh, const Reaction& r, const IntervalPair& pair, const LatticeOptions& opts = {}) {
    require_ordered(pair, mesh.size(), "minimal_solution");
    return detail::monotone_from_lower(mesh, r, pair, opts);
}

/// Biggest element: minimal solution of the reflected problem on [−upper, −lower], negated.
inline SolveReport maximal_solution(const Mesh& mesh, const Reaction& r, const IntervalPair& pair, const LatticeOptions& opts = {}) {
    require_ordered(pair, mesh.size(), "maximal_solution");
    const IntervalPair mirrored{-pair.upper, -pair.lower};
    SolveReport low = detail::monotone_from_lower(mesh, reflect(r), mirrored, opts);
    SolveReport out = make_report(Functional(mesh, r), -low.u, low.iterations);
    out.ordering = ordering_flags(out.u, pair.lower, pair.upper, containment_tol(pair));
    return out;
}

// ---------------------------------------------------------------------------------------------
// Enumeration oracle

struct EnumerateOptions {
    MinimizeOptions newton{.tol = 1e-11, .max_iterations = 80, .armijo = 1e-4, .max_backtracks = 60};
    std::uint64_t seed = 1;
};

namespace detail {

inline std::vector<GridFunction> oracle_starts(const Mesh& mesh, const IntervalPair& pair, std::size_t count, std::uint64_t seed) {
    const std::size_t n = mesh.size();
    std::vector<GridFunction> starts;
    auto clamp = [&](GridFunction u) {
        for (std::size_t i = 0; i < n; ++i) u[i] = std::clamp(u[i], pair.lower[i], pair.upper[i]);
        return u;
    };
    starts.push_back(clamp(mesh.zeros()));

    const GridFunction u1 = principal_eigenpair(mesh).u;
    const double scale = std::max(pair.lower.sup_norm(), pair.upper.sup_norm()) / u1.sup_norm();
    for (double c : {0.125, 0.25, 0.5, 1.0}) {
        starts.push_back(clamp(c * scale * u1));
        starts.push_back(clamp(-c * scale * u1));
    }

    const std::size_t corners = n >= 63 ? std::numeric_limits<std::size_t>::max() : (std::size_t{1} << n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t corner_budget = std::min(corners, count / 2);
    // Spread the corner budget over the full index range.
    for (std::size_t k = 0; k < corner_budget; ++k) {
        const std::size_t idx = corner_budget == corners ? k : static_cast<std::size_t>(unit(rng) * static_cast<double>(corners));
        GridFunction c(n);
        for (std::size_t i = 0; i < n; ++i) c[i] = ((idx >> i) & 1U) != 0U ? pair.upper[i] : pair.lower[i];
        starts.push_back(std::move(c));
    }
    while (starts.size() < count) {
        GridFunction u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = pair.lower[i] + unit(rng) * (pair.upper[i] - pair.lower[i]);
        starts.push_back(std::move(u));
    }
    starts.resize(std::min(starts.size(), std::max<std::size_t>(count, 1)));
    return starts;
}

inline std::vector<SolveReport> run_oracle(const Mesh& mesh, const Reaction& r, const IntervalPair& pair, std::size_t count,
                                           const EnumerateOptions& opts) {
    const Functional f(mesh, r);
    const double ctol = containment_tol(pair);
    std::vector<SolveReport> found;
    for (auto& start : oracle_starts(mesh, pair, count, opts.seed)) {
        SolveReport rep;
        try {
            rep = newton_solve(f, std::move(start), opts.newton);
        } catch (const ConvergenceError&) {
            continue;
        }
        const OrderingFlags flags = ordering_flags(rep.u, pair.lower, pair.upper, ctol);
        if (!flags.holds()) continue;
        rep.ordering = flags;
        const bool seen = std::any_of(found.begin(), found.end(), [&](const SolveReport& m) { return same_point(m.u, rep.u); });
        if (!seen) found.push_back(std::move(rep));
    }
    return found;
}

}  // namespace detail

/// Multistart Newton over the interval. Members are ordered by energy.
inline SolutionSet enumerate_solutions(const Mesh& mesh, const Reaction& r, const IntervalPair& pair, std::size_t starts,
                                       const EnumerateOptions& opts = {}) {
    if (mesh.size() > 8) throw ParameterError("enumerate_solutions: oracle supports at most 8 nodes");
    require_ordered(pair, mesh.size(), "enumerate_solutions");
    SolutionSet set;
    set.members = detail::run_oracle(mesh, r, pair, starts, opts);
    const std::vector<SolveReport> doubled = detail::run_oracle(mesh, r, pair, 2 * starts, opts);
    std::size_t added = 0;
    for (const auto& m : doubled) {
        const bool seen = std::any_of(set.members.begin(), set.members.end(), [&](const SolveReport& x) { return same_point(x.u, m.u); });
        if (!seen) {
            set.members.push_back(m);
            ++added;
        }
    }
    set.complete_flag = added == 0;
    std::stable_sort(set.members.begin(), set.members.end(), [](const SolveReport& a, const SolveReport& b) { return a.energy < b.energy; });
    return set;
}

/// Node-wise min / max over the members of a solution set.
inline GridFunction pointwise_min(const SolutionSet& set) {
    if (set.members.empty()) throw NotFoundError("pointwise_min: empty solution set");
    GridFunction out = set.members.front().u;
    for (const auto& m : set.members) out = meet(out, m.u);
    return out;
}

inline GridFunction pointwise_max(const SolutionSet& set) {
    if (set.members.empty()) throw NotFoundError("pointwise_max: empty solution set");
    GridFunction out = set.members.front().u;
    for (const auto& m : set.members) out = join(out, m.u);
    return out;
}

// ---------------------------------------------------------------------------------------------
// Extremal constant-sign solutions

struct ExtremalOptions {
    LatticeOptions lattice{};
    MinimizeOptions minimize{};
    /// Subsolution checks pass when the residual is below this fraction of ‖A(εû₁)‖∞.
    double subsolution_rel_tol = 1e-9;
    /// Ray search starts at ε‖û₁‖∞ = ray_start and halves.
    double ray_start = 1024.0;
    int ray_halvings = 120;
    int max_sweeps = 40;
    double sweep_tol = 1e-9;
    double degeneracy_tol = 1e-8;
};

struct ExtremalResult {
    SolveReport report;
    /// Global minimizer candidate of the positive-part functional.
    GridFunction u_hat;
    double u_hat_energy = 0.0;
    double eps_sub = 0.0;
    double eps0 = 0.0;
    int sweeps = 0;
    WeightedSup cone;
    std::vector<std::string> warnings;
};

namespace detail {

inline bool ray_subsolution(const Mesh& mesh, const Reaction& r, const GridFunction& v, double rel) {
    const double scale = std::max(apply(mesh, v).sup_norm(), r.evaluate(v).sup_norm());
    return check_subsolution(mesh, r, v, rel * scale).passed;
}

}  // namespace detail

/// Smallest positive solution as the limit of minimal solutions on [εû₁, û], ε → 0.
inline ExtremalResult smallest_positive(const Mesh& mesh, const Reaction& r, const EigenResult& principal, const ExtremalOptions& opts = {}) {
    require_same_size(principal.u, mesh.size(), "smallest_positive");
    const GridFunction& u1 = principal.u;
    ExtremalResult out;

    const OriginSlope slope = origin_slope(r, mesh.size(), mesh.p());
    if (!(slope.min > principal.lambda)) {
        out.warnings.push_back("origin slope " + std::to_string(slope.min) + " does not exceed lambda1 = " +
                               std::to_string(principal.lambda));
    }

    // εû₁ subsolutions along the ray.
    double eps = opts.ray_start / u1.sup_norm();
    double eps_sub = 0.0;
    for (int k = 0; k < opts.ray_halvings; ++k, eps *= 0.5) {
        if (detail::ray_subsolution(mesh, r, eps * u1, opts.subsolution_rel_tol)) {
            eps_sub = eps;
            break;
        }
    }
    if (eps_sub == 0.0) throw ParameterError("smallest_positive: no multiple of the principal eigenfunction is a subsolution");
    out.eps_sub = eps_sub;

    // Minimizer of the positive-part functional, started where it is most negative along the ray.
    const Functional phi_plus(mesh, positive_truncation(r));
    double best_eps = eps_sub;
    double best_val = phi_plus.value(eps_sub * u1);
    for (double e = eps_sub * 64.0; e >= eps_sub / 64.0; e *= 0.5) {
        const double v = phi_plus.value(e * u1);
        if (v < best_val) {
            best_val = v;
            best_eps = e;
        }
    }
    if (!(best_val < 0.0)) throw ParameterError("smallest_positive: positive-part functional is nonnegative along the eigenfunction ray");
    SolveReport uh = minimize(phi_plus, best_eps * u1, opts.minimize);
    if (!(uh.energy < 0.0)) throw InternalError("smallest_positive: minimizer of the positive-part functional has nonnegative energy");
    if (uh.u.min() < -1e-10 * (1.0 + uh.u.sup_norm())) throw InternalError("smallest_positive: minimizer of the positive-part functional is not nonnegative");
    out.u_hat = uh.u;
    out.u_hat_energy = uh.energy;

    // ε₀: εû₁ a verified subsolution below û.
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mesh.size(); ++i) ratio = std::min(ratio, out.u_hat[i] / u1[i]);
    double eps0 = std::min(eps_sub, ratio);
    for (int k = 0; k < opts.ray_halvings; ++k, eps0 *= 0.5) {
        const GridFunction v = eps0 * u1;
        bool below = true;
        for (std::size_t i = 0; i < mesh.size(); ++i) below = below && v[i] <= out.u_hat[i];
        if (below && detail::ray_subsolution(mesh, r, v, opts.subsolution_rel_tol)) break;
    }
    if (!(eps0 > 0.0)) throw ParameterError("smallest_positive: no admissible starting multiple below the positive minimizer");
    out.eps0 = eps0;

    std::optional<SolveReport> prev;
    for (int k = 0; k < opts.max_sweeps; ++k) {
        const double e = eps0 * std::ldexp(1.0, -k);
        const GridFunction lower = e * u1;
        bool ok = true;
        for (std::size_t i = 0; i < mesh.size(); ++i) ok = ok && lower[i] <= out.u_hat[i];
        if (!ok || !detail::ray_subsolution(mesh, r, lower, opts.subsolution_rel_tol)) {
            throw InternalError("smallest_positive: subsolution lost along the sweep");
        }
        SolveReport cur = minimal_solution(mesh, r, IntervalPair{lower, out.u_hat}, opts.lattice);
        out.sweeps = k + 1;
        if (cur.u.sup_norm() <= opts.degeneracy_tol) {
            throw ConvergenceError("smallest_positive: minimal solutions collapse to zero", cur.u, cur.residual_inf);
        }
        const bool settled = prev && sup_distance(prev->u, cur.u) <= opts.sweep_tol * (1.0 + cur.u.sup_norm());
        prev = std::move(cur);
        if (settled) break;
    }
    if (out.sweeps == opts.max_sweeps) out.warnings.push_back("epsilon sweep hit its cap before successive minima agreed");
    out.report = std::move(*prev);
    out.cone = weighted_sup(mesh, out.report.u);
    return out;
}

inline ExtremalResult smallest_positive(const Mesh& mesh, const Reaction& r, const ExtremalOptions& opts = {}) {
    return smallest_positive(mesh, r, principal_eigenpair(mesh), opts);
}

/// Biggest negative solution via the reflected reaction g(t) = −f(−t).
inline ExtremalResult biggest_negative(const Mesh& mesh, const Reaction& r, const EigenResult& principal, const ExtremalOptions& opts = {}) {
    ExtremalResult res = smallest_positive(mesh, reflect(r), principal, opts);
    SolveReport rep = make_report(Functional(mesh, r), -res.report.u, res.report.iterations);
    res.report = std::move(rep);
    res.u_hat = -res.u_hat;
    res.cone = weighted_sup(mesh, -res.report.u);
    return res;
}

inline ExtremalResult biggest_negative(const Mesh& mesh, const Reaction& r, const ExtremalOptions& opts = {}) {
    return biggest_negative(mesh, r, principal_eigenpair(mesh), opts);
}

// ---------------------------------------------------------------------------------------------
// Nodal solution

struct NodalOptions {
    MountainPassOptions mountain_pass{};
    std::size_t images = 21;
    int retries = 4;
    std::uint64_t seed = 1;
    double endpoint_tol = 1e-8;
    int curvature_directions = 10;
};

struct SpectralPathDiagnostic {
    double eps = 0.0;
    double max_value = 0.0;
    bool negative = false;
};

struct NodalResult {
    SolveReport report;
    PathState path;
    double level = 0.0;
    double energy_plus = 0.0;
    double energy_minus = 0.0;
    int attempts = 0;
    std::optional<SpectralPathDiagnostic> diagnostic;
    std::vector<std::string> retry_log;
    std::vector<std::string> warnings;
};

/// max_t Φ̃(ε γ(t)) along a spectral path, halving ε from half the interval's inner width until negative.
inline SpectralPathDiagnostic spectral_path_diagnostic(const Functional& tilde, const std::vector<GridFunction>& path,
                                                       const GridFunction& u_plus, const GridFunction& u_minus, int halvings = 40) {
    double width = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u_plus.size(); ++i) width = std::min(width, std::min(u_plus[i], -u_minus[i]));
    double amp = 0.0;
    for (const auto& g : path) amp = std::max(amp, g.sup_norm());
    SpectralPathDiagnostic d;
    if (path.empty() || !(amp > 0.0) || !(width > 0.0)) return d;
    d.eps = 0.5 * width / amp;
    for (int k = 0; k <= halvings; ++k, d.eps *= 0.5) {
        d.max_value = -std::numeric_limits<double>::infinity();
        for (const auto& g : path) d.max_value = std::max(d.max_value, tilde.value(d.eps * g));
        if (d.max_value < 0.0) break;
    }
    d.negative = d.max_value < 0.0;
    return d;
}

/// Sign-changing solution in [u₋, u₊] as a mountain-pass critical point of the truncated functional.
inline NodalResult nodal_solution(const Mesh& mesh, const Reaction& r, const SolveReport& u_plus, const SolveReport& u_minus,
                                  const NodalOptions& opts = {}, const SecondEigenResult* spectral = nullptr) {
    require_same_size(u_plus.u, mesh.size(), "nodal_solution");
    require_same_size(u_minus.u, mesh.size(), "nodal_solution");
    const IntervalPair pair{u_minus.u, u_plus.u};
    require_ordered(pair, mesh.size(), "nodal_solution");
    NodalResult out;
    if (spectral != nullptr) {
        const OriginSlope slope = origin_slope(r, mesh.size(), mesh.p());
        if (!(slope.min > spectral->lambda2)) {
            out.warnings.push_back("origin slope " + std::to_string(slope.min) + " does not exceed the lambda2 estimate " +
                                   std::to_string(spectral->lambda2));
        }
    }

    const Functional tilde(mesh, interval_truncation(r, pair.lower, pair.upper));
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (const auto* end : {&u_plus.u, &u_minus.u}) {
        const double res = tilde.residual(*end).sup_norm();
        if (res > opts.endpoint_tol) {
            throw ParameterError("nodal_solution: endpoint is not critical for the truncated functional (residual " + std::to_string(res) + ")");
        }
        const Eigen::MatrixXd hess = tilde.residual_jacobian(*end);
        for (int k = 0; k < opts.curvature_directions; ++k) {
            Eigen::VectorXd w(static_cast<Eigen::Index>(mesh.size()));
            for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = gauss(rng);
            if (!(w.dot(hess * w) > 0.0)) throw ParameterError("nodal_solution: endpoint is not a strict local minimizer");
        }
    }
    out.energy_plus = tilde.value(u_plus.u);
    out.energy_minus = tilde.value(u_minus.u);

    const GridFunction zero = mesh.zeros();
    const double ctol = containment_tol(pair);
    for (int attempt = 0; attempt <= opts.retries; ++attempt) {
        out.attempts = attempt + 1;
        MountainPassOptions mp = opts.mountain_pass;
        mp.string.seed = opts.seed + static_cast<std::uint64_t>(attempt);
        mp.endpoint_tol = opts.endpoint_tol;
        const std::size_t m = opts.images + 4 * static_cast<std::size_t>(attempt);
        const std::string tag = "attempt " + std::to_string(attempt + 1) + " (m=" + std::to_string(m) + ", seed=" +
                                std::to_string(mp.string.seed) + "): ";
        MountainPassResult res;
        try {
            res = mountain_pass(tilde, u_plus.u, u_minus.u, m, mp);
        } catch (const ConvergenceError& e) {
            out.retry_log.push_back(tag + e.what());
            continue;
        }
        if (same_point(res.saddle.u, zero)) {
            out.retry_log.push_back(tag + "saddle collapsed to zero");
            continue;
        }
        if (res.saddle.classification != SignClass::nodal) {
            out.retry_log.push_back(tag + "saddle is " + to_string(res.saddle.classification));
            continue;
        }
        const OrderingFlags flags = ordering_flags(res.saddle.u, pair.lower, pair.upper, ctol);
        if (!flags.holds()) throw InternalError("nodal_solution: saddle left the interval [u-, u+]");

        out.report = make_report(Functional(mesh, r), res.saddle.u, res.saddle.iterations);
        out.report.ordering = flags;
        out.path = std::move(res.path);
        out.level = res.level;
        out.retry_log.push_back(tag + "accepted");
        if (spectral != nullptr) out.diagnostic = spectral_path_diagnostic(tilde, spectral->path, u_plus.u, u_minus.u);
        return out;
    }
    std::string log;
    for (const auto& line : out.retry_log) log += "\n  " + line;
    throw NotFoundError("nodal_solution: no sign-changing critical point after " + std::to_string(out.attempts) + " attempts" + log);
}

}  // namespace fraclap
