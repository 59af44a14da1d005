#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/grid_function.hpp"
#include "fraclap/mesh.hpp"
#include "fraclap/operator.hpp"
#include "fraclap/string_method.hpp"

namespace fraclap {

/// Nonnegative node weights, not identically zero.
class Weight {
public:
    explicit Weight(GridFunction values) : values_(std::move(values)) {
        bool positive = false;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
                throw ParameterError("weight must be finite and nonnegative (node " + std::to_string(i) + ")");
            }
            positive = positive || values_[i] > 0.0;
        }
        if (!positive) throw ParameterError("weight must not vanish identically");
    }
    static Weight uniform(std::size_t n, double value = 1.0) { return Weight(GridFunction(n, value)); }

    const GridFunction& values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    GridFunction values_;
};

struct EigenResult {
    double lambda = 0.0;
    GridFunction u;
    double residual = 0.0;       ///< ‖A(u) − λ ρ φ_p(u)‖∞
    double normalization = 0.0;  ///< h Σ ρ_i |u_i|^p
    int descent_iterations = 0;
    int newton_iterations = 0;
};

/// h Σ ρ_i |u_i|^p
inline double weighted_lp(const Mesh& mesh, const Weight& rho, const GridFunction& u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += rho[i] * std::pow(std::abs(u[i]), mesh.p());
    return mesh.spacing() * acc;
}

/// ‖u‖^p_{s,p} / (h Σ ρ |u|^p)
inline double rayleigh_quotient(const Mesh& mesh, const Weight& rho, const GridFunction& u) {
    return mesh.p() * energy(mesh, u) / weighted_lp(mesh, rho, u);
}

inline GridFunction normalize(const Mesh& mesh, const Weight& rho, GridFunction u) {
    const double nrm = weighted_lp(mesh, rho, u);
    u *= std::pow(nrm, -1.0 / mesh.p());
    return u;
}

inline GridFunction eigen_residual(const Mesh& mesh, const Weight& rho, const GridFunction& u, double lambda) {
    GridFunction r = apply(mesh, u);
    for (std::size_t i = 0; i < u.size(); ++i) r[i] -= lambda * rho[i] * phi(u[i], mesh.p());
    return r;
}

struct EigenOptions {
    int max_descent_iterations = 200000;
    /// Descent hands over to Newton once the relative residual is below this.
    double handover = 1e-5;
    int max_newton_iterations = 50;
};

namespace detail {

/// Newton on [A(u) − λρφ(u); hΣρ|u|^p − 1] = 0. Returns false if it fails to reach `tol`.
inline bool eigen_newton(const Mesh& mesh, const Weight& rho, GridFunction& u, double& lambda, double tol, int max_it, int& used) {
    const auto n = static_cast<Eigen::Index>(mesh.size());
    const double p = mesh.p();
    const double h = mesh.spacing();
    used = 0;
    for (int it = 0; it < max_it; ++it) {
        GridFunction r = eigen_residual(mesh, rho, u, lambda);
        const double nres = weighted_lp(mesh, rho, u) - 1.0;
        if (r.sup_norm() <= tol * std::max(1.0, std::abs(lambda)) && std::abs(nres) <= 1e-13) return true;
        Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(n + 1, n + 1);
        sys.topLeftCorner(n, n) = jacobian(mesh, u);
        Eigen::VectorXd rhs(n + 1);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            sys(i, i) -= lambda * rho[ui] * phi_prime(u[ui], p);
            sys(i, n) = -rho[ui] * phi(u[ui], p);
            sys(n, i) = p * h * rho[ui] * phi(u[ui], p);
            rhs[i] = -r[ui];
        }
        rhs[n] = -nres;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
        if (!(lu.rcond() > 1e-15)) return false;
        const Eigen::VectorXd delta = lu.solve(rhs);
        if (!delta.allFinite()) return false;
        u.vec() += delta.head(n);
        lambda += delta[n];
        ++used;
    }
    GridFunction r = eigen_residual(mesh, rho, u, lambda);
    return r.sup_norm() <= tol * std::max(1.0, std::abs(lambda));
}

}  // namespace detail

/// Principal eigenpair of A(u) = λ ρ φ_p(u): projected descent on the Rayleigh quotient from the positive
/// constant vector, then Newton on the Euler–Lagrange system with the normalization constraint.
/// `tol` bounds the relative residual ‖A(u) − λρφ(u)‖∞ / max(1, λ).
inline EigenResult principal_eigenpair(const Mesh& mesh, const Weight& rho, double tol = 1e-10, const EigenOptions& opts = {}) {
    if (rho.size() != mesh.size()) throw ParameterError("principal_eigenpair: weight size mismatch");
    if (!(tol > 0.0)) throw ParameterError("principal_eigenpair: tol must be positive");
    const double p = mesh.p();
    const double h = mesh.spacing();

    EigenResult res;
    GridFunction u = normalize(mesh, rho, mesh.constant(1.0));
    double lambda = rayleigh_quotient(mesh, rho, u);
    int it = 0;
    for (; it < opts.max_descent_iterations; ++it) {
        GridFunction r = eigen_residual(mesh, rho, u, lambda);
        if (r.sup_norm() <= opts.handover * std::max(1.0, lambda)) break;
        double rho_max = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) rho_max = std::max(rho_max, rho[i] * phi_prime(u[i], p));
        double step = 2.0 / (jacobian_bound(mesh, u) + lambda * rho_max);
        const double slope = p * h * r.vec().squaredNorm();
        bool accepted = false;
        for (int k = 0; k < 60; ++k) {
            GridFunction trial = normalize(mesh, rho, GridFunction(u.vec() - step * r.vec()));
            const double lt = rayleigh_quotient(mesh, rho, trial);
            if (lt <= lambda - 1e-4 * step * slope) {
                u = std::move(trial);
                lambda = lt;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // round-off floor; Newton takes over
    }
    res.descent_iterations = it;

    int used = 0;
    if (!detail::eigen_newton(mesh, rho, u, lambda, tol, opts.max_newton_iterations, used)) {
        throw ConvergenceError("principal_eigenpair: Newton polish did not converge", u,
                               eigen_residual(mesh, rho, u, lambda).sup_norm());
    }
    res.newton_iterations = used;
    u = normalize(mesh, rho, std::move(u));
    if (u.min() <= 0.0) {
        throw ConvergenceError("principal_eigenpair: iterate left the positive cone", u,
                               eigen_residual(mesh, rho, u, lambda).sup_norm());
    }
    res.u = std::move(u);
    res.lambda = lambda;
    res.residual = eigen_residual(mesh, rho, res.u, lambda).sup_norm();
    res.normalization = weighted_lp(mesh, rho, res.u);
    return res;
}

inline EigenResult principal_eigenpair(const Mesh& mesh, double tol = 1e-10) {
    return principal_eigenpair(mesh, Weight::uniform(mesh.size()), tol);
}

struct SecondEigenResult {
    double lambda2 = 0.0;
    std::vector<GridFunction> path;
    std::size_t max_index = 0;
    /// Eigen residual of the top state when the Newton polish was accepted, else the string gradient.
    double residual = 0.0;
    bool polished = false;
    int iterations = 0;
};

/// Upper estimate of λ₂ as the top of a string on the discrete L^p unit sphere joining û₁ to −û₁.
/// The highest state climbs to the sphere-constrained saddle, which is then Newton-polished as an
/// eigenpair when the polish stays close and sign-changing.
inline SecondEigenResult second_eigenvalue_minimax(const Mesh& mesh, const EigenResult& principal, std::size_t path_nodes,
                                                   double tol = 1e-8, StringOptions opts = {}) {
    if (path_nodes < 5) throw ParameterError("second_eigenvalue_minimax: need at least 5 path nodes");
    require_same_size(principal.u, mesh.size(), "second_eigenvalue_minimax");
    const Weight one = Weight::uniform(mesh.size());
    const double p = mesh.p();
    const GridFunction& u1 = principal.u;

    // Initial path: rotate û₁ through an odd-weighted copy of itself.
    const double mid = 0.5 * (mesh.params().a + mesh.params().b);
    const double half = 0.5 * (mesh.params().b - mesh.params().a);
    GridFunction odd(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) odd[i] = u1[i] * (mesh.nodes()[i] - mid) / half;
    if (odd.sup_norm() == 0.0) odd = mesh.constant(1.0);  // single node: path is degenerate anyway
    std::vector<GridFunction> states;
    for (std::size_t k = 0; k < path_nodes; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(path_nodes - 1);
        GridFunction g(std::cos(std::numbers::pi * t) * u1.vec() + std::sin(std::numbers::pi * t) * odd.vec());
        states.push_back(normalize(mesh, one, std::move(g)));
    }
    states.front() = u1;
    states.back() = -u1;

    StringLandscape land;
    land.energy = [&](const GridFunction& u) { return rayleigh_quotient(mesh, one, u); };
    land.gradient = [&](const GridFunction& u) { return eigen_residual(mesh, one, u, rayleigh_quotient(mesh, one, u)); };
    land.curvature_bound = [&](const GridFunction& u) {
        double m = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, phi_prime(u[i], p));
        return jacobian_bound(mesh, u) + rayleigh_quotient(mesh, one, u) * m;
    };
    land.project = [&](GridFunction u) { return normalize(mesh, one, std::move(u)); };

    opts.images = path_nodes;
    opts.tol = tol;
    StringPath path = relax_string(land, std::move(states), opts);
    if (!path.converged) throw StringConvergenceError("second_eigenvalue_minimax: string did not converge", std::move(path));

    SecondEigenResult out;
    out.iterations = path.iterations;
    out.max_index = path.max_index;
    out.residual = path.climb_gradient;

    GridFunction top = path.states[path.max_index];
    double lam = path.energies[path.max_index];
    GridFunction cand = top;
    double cand_lam = lam;
    int used = 0;
    if (detail::eigen_newton(mesh, one, cand, cand_lam, 1e-11, 50, used)) {
        cand = normalize(mesh, one, std::move(cand));
        const bool close = sup_distance(cand, top) <= 0.1 * top.sup_norm() && std::abs(cand_lam - lam) <= 0.01 * lam;
        const bool nodal = cand.min() < 0.0 && cand.max() > 0.0;
        if (close && nodal) {
            path.states[path.max_index] = cand;
            path.energies[path.max_index] = rayleigh_quotient(mesh, one, cand);
            out.polished = true;
            out.residual = eigen_residual(mesh, one, cand, cand_lam).sup_norm();
        }
    }
    out.lambda2 = *std::max_element(path.energies.begin(), path.energies.end());
    if (!(out.lambda2 >= principal.lambda)) {
        throw InternalError("second_eigenvalue_minimax: path maximum below the principal eigenvalue");
    }
    out.path = std::move(path.states);
    return out;
}

struct WeightComparison {
    double lambda_rho = 0.0;
    double lambda_rho_tilde = 0.0;
    double gap = 0.0;  ///< λ₁(ρ̃) − λ₁(ρ)
    bool strict = false;
};

/// Principal eigenvalues for ρ̃ ≤ ρ (ρ̃ ≢ ρ); λ₁(ρ) < λ₁(ρ̃) is expected.
inline WeightComparison weight_compare(const Mesh& mesh, const Weight& rho, const Weight& rho_tilde, double tol = 1e-11) {
    if (rho.size() != mesh.size() || rho_tilde.size() != mesh.size()) throw ParameterError("weight_compare: size mismatch");
    bool differs = false;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (rho_tilde[i] > rho[i]) {
            throw ParameterError("weight_compare: rho_tilde exceeds rho at node " + std::to_string(i));
        }
        differs = differs || rho_tilde[i] < rho[i];
    }
    if (!differs) throw ParameterError("weight_compare: rho_tilde must differ from rho");
    WeightComparison out;
    out.lambda_rho = principal_eigenpair(mesh, rho, tol).lambda;
    out.lambda_rho_tilde = principal_eigenpair(mesh, rho_tilde, tol).lambda;
    out.gap = out.lambda_rho_tilde - out.lambda_rho;
    out.strict = out.gap > 1e-10 * std::max(1.0, out.lambda_rho);
    return out;
}

}  // namespace fraclap
