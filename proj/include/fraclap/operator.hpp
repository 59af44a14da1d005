#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>

#include "fraclap/errors.hpp"
#include "fraclap/grid_function.hpp"
#include "fraclap/mesh.hpp"

namespace fraclap {

/// Regularization used for |t|^{p-2} in the linearization when p < 2.
inline constexpr double kRegularizationDelta = 1e-10;

/// φ_p(t) = |t|^{p−2} t
inline double phi(double t, double p) {
    if (p == 2.0) return t;
    return std::copysign(std::pow(std::abs(t), p - 1.0), t);
}

/// φ_p'(t) = (p−1)|t|^{p−2}, δ-regularized for p < 2.
inline double phi_prime(double t, double p) {
    if (p == 2.0) return 1.0;
    if (p >= 2.0) return (p - 1.0) * std::pow(std::abs(t), p - 2.0);
    const double r2 = t * t + kRegularizationDelta * kRegularizationDelta;
    return std::pow(r2, 0.5 * (p - 2.0)) * (1.0 + (p - 2.0) * t * t / r2);
}

/// (1/p)[ Σ_{i≠j} h² |u_i − u_j|^p w_ij + Σ_i h t_i |u_i|^p ]
inline double energy(const Mesh& mesh, const GridFunction& u) {
    require_same_size(u, mesh.size(), "energy");
    const std::size_t n = mesh.size();
    const double p = mesh.p();
    const double h = mesh.spacing();
    double pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) row += std::pow(std::abs(u[i] - u[j]), p) * mesh.kernel(i, j);
        pairs += row;
    }
    double tails = 0.0;
    for (std::size_t i = 0; i < n; ++i) tails += mesh.tail()[i] * std::pow(std::abs(u[i]), p);
    return (2.0 * h * h * pairs + h * tails) / p;
}

/// Strong-form residual of the operator: A(u)_i = 2h Σ_{j≠i} φ_p(u_i − u_j) w_ij + t_i φ_p(u_i).
/// Equals the energy gradient divided by h.
inline GridFunction apply(const Mesh& mesh, const GridFunction& u) {
    require_same_size(u, mesh.size(), "apply");
    const std::size_t n = mesh.size();
    const double p = mesh.p();
    const double h = mesh.spacing();
    GridFunction out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            row += phi(u[i] - u[j], p) * mesh.kernel(i, j);
        }
        out[i] = 2.0 * h * row + mesh.tail()[i] * phi(u[i], p);
    }
    return out;
}

/// Discrete duality pairing ⟨A(u), v⟩ evaluated as the double sum.
inline double pair(const Mesh& mesh, const GridFunction& u, const GridFunction& v) {
    require_same_size(u, mesh.size(), "pair");
    require_same_size(v, mesh.size(), "pair");
    const std::size_t n = mesh.size();
    const double p = mesh.p();
    const double h = mesh.spacing();
    double pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            pairs += phi(u[i] - u[j], p) * (v[i] - v[j]) * mesh.kernel(i, j);
        }
    }
    double tails = 0.0;
    for (std::size_t i = 0; i < n; ++i) tails += mesh.tail()[i] * phi(u[i], p) * v[i];
    return h * h * pairs + h * tails;
}

/// Directional derivative of apply() at u in direction w.
inline GridFunction second_derivative_action(const Mesh& mesh, const GridFunction& u, const GridFunction& w) {
    require_same_size(u, mesh.size(), "second_derivative_action");
    require_same_size(w, mesh.size(), "second_derivative_action");
    const std::size_t n = mesh.size();
    const double p = mesh.p();
    const double h = mesh.spacing();
    GridFunction out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            row += phi_prime(u[i] - u[j], p) * (w[i] - w[j]) * mesh.kernel(i, j);
        }
        out[i] = 2.0 * h * row + mesh.tail()[i] * phi_prime(u[i], p) * w[i];
    }
    return out;
}

/// Dense Jacobian of apply() at u; symmetric.
inline Eigen::MatrixXd jacobian(const Mesh& mesh, const GridFunction& u) {
    require_same_size(u, mesh.size(), "jacobian");
    const auto n = static_cast<Eigen::Index>(mesh.size());
    const double p = mesh.p();
    const double h = mesh.spacing();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto ui = static_cast<std::size_t>(i);
            const auto uj = static_cast<std::size_t>(j);
            const double c = 2.0 * h * phi_prime(u[ui] - u[uj], p) * mesh.kernel(ui, uj);
            jac(i, j) -= c;
            jac(j, i) -= c;
            jac(i, i) += c;
            jac(j, j) += c;
        }
        const auto ui = static_cast<std::size_t>(i);
        jac(i, i) += mesh.tail()[ui] * phi_prime(u[ui], p);
    }
    return jac;
}

/// Gershgorin bound on the spectral radius of the Jacobian at u.
inline double jacobian_bound(const Mesh& mesh, const GridFunction& u) {
    const std::size_t n = mesh.size();
    const double p = mesh.p();
    const double h = mesh.spacing();
    double bound = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double off = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            off += 2.0 * h * phi_prime(u[i] - u[j], p) * mesh.kernel(i, j);
        }
        bound = std::max(bound, 2.0 * off + mesh.tail()[i] * phi_prime(u[i], p));
    }
    return bound;
}

struct RhsSolveOptions {
    double tol = 1e-12;
    int max_iterations = 200;
};

/// Solves A(w) + σ φ_p(w) = g (σ ≥ 0) by damped Newton on the strictly convex energy
/// J(w) + (σ/p) h Σ|w_i|^p − h Σ g_i w_i.
inline GridFunction solve_rhs(const Mesh& mesh, const GridFunction& g, double sigma, GridFunction start,
                              const RhsSolveOptions& opts = {}) {
    require_same_size(g, mesh.size(), "solve_rhs");
    require_same_size(start, mesh.size(), "solve_rhs");
    if (sigma < 0.0) throw ParameterError("solve_rhs: shift must be nonnegative");
    const double p = mesh.p();
    const double h = mesh.spacing();
    const std::size_t n = mesh.size();

    auto objective = [&](const GridFunction& w) {
        double val = energy(mesh, w);
        for (std::size_t i = 0; i < n; ++i) val += h * (sigma * std::pow(std::abs(w[i]), p) / p - g[i] * w[i]);
        return val;
    };
    auto residual = [&](const GridFunction& w) {
        GridFunction r = apply(mesh, w);
        for (std::size_t i = 0; i < n; ++i) r[i] += sigma * phi(w[i], p) - g[i];
        return r;
    };

    GridFunction w = std::move(start);
    GridFunction r = residual(w);
    double value = objective(w);
    const double scale = 1.0 + g.sup_norm();
    for (int it = 0; it < opts.max_iterations; ++it) {
        if (r.sup_norm() <= opts.tol * scale) return w;
        Eigen::MatrixXd jac = jacobian(mesh, w);
        for (std::size_t i = 0; i < n; ++i) {
            jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += sigma * phi_prime(w[i], p);
        }
        // Degenerate curvature (p > 2 at coinciding values) is lifted by a small diagonal shift.
        const double lift = 1e-14 * (1.0 + jac.diagonal().cwiseAbs().maxCoeff());
        Eigen::LLT<Eigen::MatrixXd> llt(jac + lift * Eigen::MatrixXd::Identity(jac.rows(), jac.cols()));
        Eigen::VectorXd dir = llt.info() == Eigen::Success ? Eigen::VectorXd(llt.solve(-r.vec())) : Eigen::VectorXd(-r.vec());
        {
            // Near the solution energy decrements drop below round-off; judge the full step by its residual.
            GridFunction full(w.vec() + dir);
            GridFunction fr = residual(full);
            const double fv = objective(full);
            if (fr.sup_norm() <= 0.5 * r.sup_norm() && fv <= value + 1e-13 * (1.0 + std::abs(value))) {
                w = std::move(full);
                r = std::move(fr);
                value = fv;
                continue;
            }
        }
        const double slope = h * r.vec().dot(dir);
        double step = 1.0;
        bool accepted = false;
        for (int k = 0; k < 60; ++k) {
            GridFunction trial(w.vec() + step * dir);
            const double tv = objective(trial);
            if (tv <= value + 1e-4 * step * slope) {
                w = std::move(trial);
                value = tv;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // Energy differences below round-off: take the Newton step if it reduces the residual.
            GridFunction trial(w.vec() + dir);
            GridFunction tr = residual(trial);
            if (tr.sup_norm() < r.sup_norm()) {
                w = std::move(trial);
                value = objective(w);
                r = std::move(tr);
                continue;
            }
            if (r.sup_norm() <= 1e3 * opts.tol * scale) return w;
            throw ConvergenceError("solve_rhs: line search failed", w, r.sup_norm());
        }
        r = residual(w);
    }
    if (r.sup_norm() <= opts.tol * scale) return w;
    throw ConvergenceError("solve_rhs: iteration cap reached", w, r.sup_norm());
}

}  // namespace fraclap
