#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/grid_function.hpp"

namespace fraclap {

struct StringOptions {
    std::size_t images = 21;
    int max_iterations = 50000;
    /// Stop once the climbing image's gradient sup-norm drops below this.
    double tol = 1e-7;
    /// Fraction of 1/L used as the explicit step, L a local curvature bound.
    double step_scale = 0.5;
    /// Plain string iterations before the highest image starts climbing.
    int climb_after = 200;
    /// Relative amplitude of the random perturbation of the initial path.
    double noise = 0.0;
    std::uint64_t seed = 1;
};

/// Energy landscape seen by the string.
struct StringLandscape {
    std::function<double(const GridFunction&)> energy;
    /// Gradient in node coordinates (strong-form scaling is fine; only its direction and a matching curvature bound matter).
    std::function<GridFunction(const GridFunction&)> gradient;
    /// Upper bound on the curvature of the energy near the argument.
    std::function<double(const GridFunction&)> curvature_bound;
    /// Retraction onto the admissible set; identity when unconstrained.
    std::function<GridFunction(GridFunction)> project = [](GridFunction u) { return u; };
};

struct StringPath {
    std::vector<GridFunction> states;
    std::vector<double> energies;
    std::size_t max_index = 0;
    double climb_gradient = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

/// Raised when the string did not settle; carries the last path.
class StringConvergenceError : public ConvergenceError {
public:
    StringConvergenceError(const std::string& what, StringPath path)
        : ConvergenceError(what, path.states.at(path.max_index), path.climb_gradient), path_(std::move(path)) {}
    const StringPath& path() const noexcept { return path_; }

private:
    StringPath path_;
};

namespace detail {

inline double euclid(const GridFunction& a, const GridFunction& b) { return (a.vec() - b.vec()).norm(); }

/// Redistributes states[first..last] (inclusive, endpoints held) to equal chord length.
inline void reparametrize_segment(std::vector<GridFunction>& states, std::size_t first, std::size_t last,
                                  const std::function<GridFunction(GridFunction)>& project) {
    if (last <= first + 1) return;
    std::vector<double> arc(last - first + 1, 0.0);
    for (std::size_t k = first + 1; k <= last; ++k) arc[k - first] = arc[k - first - 1] + euclid(states[k], states[k - 1]);
    const double total = arc.back();
    if (!(total > 0.0)) return;
    std::vector<GridFunction> fresh;
    fresh.reserve(last - first - 1);
    std::size_t seg = 0;
    for (std::size_t k = first + 1; k < last; ++k) {
        const double target = total * static_cast<double>(k - first) / static_cast<double>(last - first);
        while (seg + 1 < arc.size() - 1 && arc[seg + 1] < target) ++seg;
        const double len = arc[seg + 1] - arc[seg];
        const double w = len > 0.0 ? (target - arc[seg]) / len : 0.0;
        GridFunction interp((1.0 - w) * states[first + seg].vec() + w * states[first + seg + 1].vec());
        fresh.push_back(project(std::move(interp)));
    }
    for (std::size_t k = first + 1; k < last; ++k) states[k] = std::move(fresh[k - first - 1]);
}

}  // namespace detail

/// Path through `a` and `b` given by linear interpolation, interior states perturbed by seeded noise
/// with a sin(πt) envelope so the endpoints stay fixed.
inline std::vector<GridFunction> linear_path(const GridFunction& a, const GridFunction& b, std::size_t images, double noise,
                                             std::uint64_t seed) {
    std::vector<GridFunction> states;
    states.reserve(images);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double amp = noise * std::max(a.sup_norm(), b.sup_norm());
    for (std::size_t k = 0; k < images; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(images - 1);
        GridFunction u((1.0 - t) * a.vec() + t * b.vec());
        if (k != 0 && k + 1 != images && amp > 0.0) {
            const double env = std::sin(std::numbers::pi * t);
            for (std::size_t i = 0; i < u.size(); ++i) u[i] += amp * env * unit(rng);
        }
        states.push_back(std::move(u));
    }
    states.front() = a;
    states.back() = b;
    return states;
}

/// Climbing-image string relaxation. Endpoints are never modified. Interior states take explicit
/// descent steps and are redistributed to equal chord length; after `climb_after` iterations the
/// highest interior state instead ascends along the local tangent, converging to a first-order saddle.
inline StringPath relax_string(const StringLandscape& landscape, std::vector<GridFunction> states, const StringOptions& opts) {
    if (states.size() < 3) throw ParameterError("relax_string: need at least 3 states");
    const std::size_t m = states.size();
    StringPath out;
    out.energies.assign(m, 0.0);

    auto refresh = [&] {
        for (std::size_t k = 0; k < m; ++k) out.energies[k] = landscape.energy(states[k]);
        std::size_t imax = 1;
        for (std::size_t k = 1; k + 1 < m; ++k) {
            if (out.energies[k] > out.energies[imax]) imax = k;
        }
        out.max_index = imax;
    };

    refresh();
    for (int it = 0; it < opts.max_iterations; ++it) {
        const bool climbing = it >= opts.climb_after;
        const std::size_t ci = out.max_index;
        for (std::size_t k = 1; k + 1 < m; ++k) {
            GridFunction g = landscape.gradient(states[k]);
            const double step = opts.step_scale / std::max(landscape.curvature_bound(states[k]), 1e-300);
            if (climbing && k == ci) {
                Eigen::VectorXd tangent = states[k + 1].vec() - states[k - 1].vec();
                const double tn = tangent.norm();
                if (tn > 0.0) tangent /= tn;
                g.vec() -= 2.0 * g.vec().dot(tangent) * tangent;
            }
            states[k] = landscape.project(GridFunction(states[k].vec() - step * g.vec()));
        }
        if (climbing) {
            detail::reparametrize_segment(states, 0, ci, landscape.project);
            detail::reparametrize_segment(states, ci, m - 1, landscape.project);
        } else {
            detail::reparametrize_segment(states, 0, m - 1, landscape.project);
        }
        refresh();
        out.iterations = it + 1;
        if (climbing) {
            out.climb_gradient = landscape.gradient(states[out.max_index]).sup_norm();
            if (out.climb_gradient <= opts.tol) {
                out.converged = true;
                break;
            }
        }
    }
    out.states = std::move(states);
    return out;
}

}  // namespace fraclap
