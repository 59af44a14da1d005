#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/grid_function.hpp"
#include "fraclap/mesh.hpp"
#include "fraclap/operator.hpp"
#include "fraclap/reaction.hpp"
#include "fraclap/string_method.hpp"

namespace fraclap {

enum class SignClass { positive, negative, nodal, zero };

inline const char* to_string(SignClass c) {
    switch (c) {
        case SignClass::positive: return "positive";
        case SignClass::negative: return "negative";
        case SignClass::nodal: return "nodal";
        case SignClass::zero: return "zero";
    }
    return "unknown";
}

/// zero if ‖u‖∞ ≤ tol; positive if u ≥ −tol with some entry above tol; negative symmetrically;
/// nodal when entries of both signs exceed tol.
inline SignClass sign_classify(const GridFunction& u, double tol) {
    if (u.size() == 0 || u.sup_norm() <= tol) return SignClass::zero;
    const bool has_pos = u.max() > tol;
    const bool has_neg = u.min() < -tol;
    if (has_pos && has_neg) return SignClass::nodal;
    return has_pos ? SignClass::positive : SignClass::negative;
}

inline SignClass sign_classify(const Mesh& mesh, const GridFunction& u, double tol) {
    require_same_size(u, mesh.size(), "sign_classify");
    return sign_classify(u, tol);
}

/// Default classification threshold relative to the function's size.
inline double classification_tol(const GridFunction& u) { return 1e-9 * (1.0 + u.sup_norm()); }

/// Φ(u) = ‖u‖^p_{s,p}/p − h Σ F(x_i, u_i) for a (possibly truncated) reaction.
class Functional {
public:
    Functional(const Mesh& mesh, Reaction reaction) : mesh_(&mesh), reaction_(std::move(reaction)) {}

    const Mesh& mesh() const noexcept { return *mesh_; }
    const Reaction& reaction() const noexcept { return reaction_; }

    double value(const GridFunction& u) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) acc += reaction_.primitive(i, u[i]);
        return energy(*mesh_, u) - mesh_->spacing() * acc;
    }

    /// A(u) − f(·, u): the gradient divided by h.
    GridFunction residual(const GridFunction& u) const {
        GridFunction r = apply(*mesh_, u);
        for (std::size_t i = 0; i < u.size(); ++i) r[i] -= reaction_.value(i, u[i]);
        return r;
    }

    GridFunction gradient(const GridFunction& u) const { return mesh_->spacing() * residual(u); }

    /// Jacobian of residual(); the Hessian divided by h.
    Eigen::MatrixXd residual_jacobian(const GridFunction& u) const {
        Eigen::MatrixXd jac = jacobian(*mesh_, u);
        for (std::size_t i = 0; i < u.size(); ++i) {
            jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) -= reaction_.derivative(i, u[i]);
        }
        return jac;
    }

    double curvature_bound(const GridFunction& u) const {
        double m = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(reaction_.derivative(i, u[i])));
        return jacobian_bound(*mesh_, u) + m;
    }

private:
    const Mesh* mesh_;
    Reaction reaction_;
};

inline std::pair<double, GridFunction> value_and_gradient(const Functional& f, const GridFunction& u) {
    require_same_size(u, f.mesh().size(), "value_and_gradient");
    return {f.value(u), f.gradient(u)};
}

struct OrderingFlags {
    bool above_lower = false;
    bool below_upper = false;
    bool holds() const noexcept { return above_lower && below_upper; }
};

struct SolveReport {
    GridFunction u;
    double residual_inf = 0.0;
    double energy = 0.0;
    int iterations = 0;
    SignClass classification = SignClass::zero;
    std::optional<OrderingFlags> ordering;
    std::vector<double> energy_history;
};

/// Recomputes residual, energy and sign class for u under the functional's reaction.
inline SolveReport make_report(const Functional& f, GridFunction u, int iterations) {
    SolveReport rep;
    rep.residual_inf = f.residual(u).sup_norm();
    rep.energy = f.value(u);
    rep.iterations = iterations;
    rep.classification = sign_classify(u, classification_tol(u));
    rep.u = std::move(u);
    return rep;
}

/// lower − tol ≤ u ≤ upper + tol node-wise.
inline OrderingFlags ordering_flags(const GridFunction& u, const GridFunction& lower, const GridFunction& upper, double tol) {
    OrderingFlags flags{true, true};
    for (std::size_t i = 0; i < u.size(); ++i) {
        flags.above_lower = flags.above_lower && u[i] >= lower[i] - tol;
        flags.below_upper = flags.below_upper && u[i] <= upper[i] + tol;
    }
    return flags;
}

struct MinimizeOptions {
    /// Converged when ‖A(u) − f(u)‖∞ ≤ tol.
    double tol = 1e-10;
    int max_iterations = 500;
    double armijo = 1e-4;
    int max_backtracks = 60;
};

/// Line-search descent on Φ. Directions come from a (shifted, if indefinite) Cholesky solve of the
/// Hessian, falling back to steepest descent, so the final iterations are Newton steps.
/// Energies are recorded per accepted step and never increase beyond round-off.
inline SolveReport minimize(const Functional& f, GridFunction start, const MinimizeOptions& opts = {}) {
    require_same_size(start, f.mesh().size(), "minimize");
    const double h = f.mesh().spacing();
    GridFunction u = std::move(start);
    double value = f.value(u);
    GridFunction r = f.residual(u);
    std::vector<double> history{value};
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        if (r.sup_norm() <= opts.tol) break;
        const Eigen::MatrixXd hess = f.residual_jacobian(u);
        const auto n = hess.rows();
        const double scale = 1.0 + hess.diagonal().cwiseAbs().maxCoeff();
        Eigen::VectorXd dir;
        for (double shift = 0.0; shift < 1e3 * scale; shift = shift == 0.0 ? 1e-10 * scale : shift * 10.0) {
            Eigen::LLT<Eigen::MatrixXd> llt(hess + shift * Eigen::MatrixXd::Identity(n, n));
            if (llt.info() == Eigen::Success) {
                dir = llt.solve(-r.vec());
                break;
            }
        }
        if (dir.size() == 0 || !dir.allFinite() || r.vec().dot(dir) >= 0.0) dir = -r.vec() / f.curvature_bound(u);

        {
            GridFunction full(u.vec() + dir);
            GridFunction fr = f.residual(full);
            const double fv = f.value(full);
            if (fr.sup_norm() <= 0.5 * r.sup_norm() && fv <= value + 1e-13 * (1.0 + std::abs(value))) {
                u = std::move(full);
                r = std::move(fr);
                value = fv;
                history.push_back(value);
                continue;
            }
        }
        const double slope = h * r.vec().dot(dir);
        double step = 1.0;
        bool accepted = false;
        for (int k = 0; k < opts.max_backtracks; ++k) {
            GridFunction trial(u.vec() + step * dir);
            const double tv = f.value(trial);
            if (tv <= value + opts.armijo * step * slope) {
                u = std::move(trial);
                value = tv;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // Decrease below energy round-off: accept the full step only if it shrinks the residual
            // without raising the energy beyond round-off.
            GridFunction trial(u.vec() + dir);
            const double tv = f.value(trial);
            GridFunction tr = f.residual(trial);
            if (tr.sup_norm() < r.sup_norm() && tv <= value + 1e-13 * (1.0 + std::abs(value))) {
                u = std::move(trial);
                value = tv;
            } else {
                throw ConvergenceError("minimize: line search failed", u, r.sup_norm());
            }
        }
        history.push_back(value);
        r = f.residual(u);
    }
    if (r.sup_norm() > opts.tol) throw ConvergenceError("minimize: iteration cap reached", u, r.sup_norm());
    SolveReport rep = make_report(f, std::move(u), it);
    rep.energy_history = std::move(history);
    return rep;
}

/// Damped Newton on A(u) = f(u) with the residual norm as merit. May converge to saddles.
inline SolveReport newton_solve(const Functional& f, GridFunction start, const MinimizeOptions& opts = {}) {
    require_same_size(start, f.mesh().size(), "newton_solve");
    GridFunction u = std::move(start);
    GridFunction r = f.residual(u);
    GridFunction best = u;
    double best_res = r.sup_norm();
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        if (r.sup_norm() <= opts.tol) break;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(f.residual_jacobian(u));
        const double rc = lu.rcond();
        if (!(rc > 1e-15)) {
            throw SingularJacobianError("newton_solve: singular linearization (rcond " + std::to_string(rc) + ")", u, rc);
        }
        const Eigen::VectorXd dir = lu.solve(-r.vec());
        const double merit = r.vec().norm();
        double step = 1.0;
        bool accepted = false;
        for (int k = 0; k < opts.max_backtracks; ++k) {
            GridFunction trial(u.vec() + step * dir);
            GridFunction tr = f.residual(trial);
            if (tr.all_finite() && tr.vec().norm() <= (1.0 - 1e-4 * step) * merit) {
                u = std::move(trial);
                r = std::move(tr);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) throw ConvergenceError("newton_solve: no residual decrease along Newton direction", best, best_res);
        if (r.sup_norm() < best_res) {
            best = u;
            best_res = r.sup_norm();
        }
    }
    if (r.sup_norm() > opts.tol) throw ConvergenceError("newton_solve: iteration cap reached", best, best_res);
    return make_report(f, std::move(u), it);
}

/// States of a path and their recomputed energies.
struct PathState {
    std::vector<GridFunction> states;
    std::vector<double> energies;
    std::size_t max_index = 0;
};

inline PathState make_path_state(const Functional& f, std::vector<GridFunction> states) {
    PathState ps;
    ps.energies.reserve(states.size());
    for (const auto& s : states) ps.energies.push_back(f.value(s));
    ps.max_index = static_cast<std::size_t>(std::max_element(ps.energies.begin(), ps.energies.end()) - ps.energies.begin());
    ps.states = std::move(states);
    return ps;
}

struct MountainPassOptions {
    StringOptions string{.images = 21, .max_iterations = 100000, .tol = 1e-6, .step_scale = 0.5, .climb_after = 300, .noise = 0.05, .seed = 1};
    MinimizeOptions newton{};
    /// Endpoints must be critical to this residual.
    double endpoint_tol = 1e-8;
};

struct MountainPassResult {
    SolveReport saddle;
    PathState path;
    double level = 0.0;  ///< highest energy on the final path
};

/// Climbing string between two local minimizers a and b; the highest state is Newton-polished.
inline MountainPassResult mountain_pass(const Functional& f, const GridFunction& a, const GridFunction& b, std::size_t m,
                                        const MountainPassOptions& opts = {}) {
    require_same_size(a, f.mesh().size(), "mountain_pass");
    require_same_size(b, f.mesh().size(), "mountain_pass");
    if (m < 7) throw ParameterError("mountain_pass: need at least 7 path states");
    const double ra = f.residual(a).sup_norm();
    const double rb = f.residual(b).sup_norm();
    if (ra > opts.endpoint_tol || rb > opts.endpoint_tol) {
        throw ParameterError("mountain_pass: endpoints are not critical (residuals " + std::to_string(ra) + ", " +
                             std::to_string(rb) + ")");
    }

    StringLandscape land;
    land.energy = [&](const GridFunction& u) { return f.value(u); };
    land.gradient = [&](const GridFunction& u) { return f.residual(u); };
    land.curvature_bound = [&](const GridFunction& u) { return f.curvature_bound(u); };

    StringOptions so = opts.string;
    so.images = m;
    StringPath path = relax_string(land, linear_path(a, b, m, so.noise, so.seed), so);
    if (!path.converged) throw StringConvergenceError("mountain_pass: string did not converge", std::move(path));

    SolveReport saddle = newton_solve(f, path.states[path.max_index], opts.newton);
    if (same_point(saddle.u, a) || same_point(saddle.u, b)) {
        throw DegeneratePathError("mountain_pass: saddle collapsed onto an endpoint", saddle.u);
    }
    path.states[path.max_index] = saddle.u;
    MountainPassResult out;
    out.path = make_path_state(f, std::move(path.states));
    out.level = out.path.energies[out.path.max_index];
    saddle.iterations += path.iterations;
    out.saddle = std::move(saddle);
    return out;
}

}  // namespace fraclap
