#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/grid_function.hpp"

namespace fraclap {

/// Exponents, domain and resolution of a one-dimensional problem on Ω = (a, b).
struct ProblemParams {
    double p = 2.0;
    double s = 0.5;
    double a = -1.0;
    double b = 1.0;
    std::size_t n = 64;
    double c0 = 1.0;
    double q = 3.0;

    static constexpr int dimension = 1;

    friend bool operator==(const ProblemParams&, const ProblemParams&) = default;

    /// Critical Sobolev exponent N p / (N − p s); +inf when p s ≥ N.
    double critical_exponent() const {
        const double ps = p * s;
        if (ps >= dimension) return std::numeric_limits<double>::infinity();
        return dimension * p / (dimension - ps);
    }

    /// Throws ParameterError naming the first violated bound.
    void validate() const {
        if (!(s > 0.0 && s < 1.0)) throw ParameterError("s must lie in (0,1), got " + std::to_string(s));
        if (!(p > 1.0)) throw ParameterError("p must exceed 1, got " + std::to_string(p));
        if (!(a < b)) throw ParameterError("domain requires a < b, got a=" + std::to_string(a) + " b=" + std::to_string(b));
        if (n < 1) throw ParameterError("n must be at least 1");
        if (!(c0 > 0.0)) throw ParameterError("growth constant c0 must be positive, got " + std::to_string(c0));
    }

    /// Non-fatal departures from the standing assumptions p ≥ 2, N > p s.
    std::vector<std::string> warnings() const {
        std::vector<std::string> out;
        if (p < 2.0) out.push_back("p < 2: second derivative uses delta-regularized |t| (delta = 1e-10)");
        if (p * s >= dimension) out.push_back("p*s >= N: critical exponent is infinite, growth check enforces the polynomial bound only");
        const double crit = critical_exponent();
        if (!(q > p) || (std::isfinite(crit) && !(q < crit))) {
            out.push_back("growth exponent q = " + std::to_string(q) + " lies outside (p, p*_s)");
        }
        return out;
    }
};

/// Uniform interior grid of (a, b) with closed-form exterior tail weights.
class Mesh {
public:
    explicit Mesh(const ProblemParams& params) : params_(params) {
        params_.validate();
        const std::size_t n = params_.n;
        h_ = (params_.b - params_.a) / static_cast<double>(n + 1);
        const double ps = params_.p * params_.s;
        nodes_.resize(n);
        dist_.resize(n);
        tail_.resize(n);
        dist_s_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = params_.a + static_cast<double>(i + 1) * h_;
            nodes_[i] = x;
            const double left = x - params_.a;
            const double right = params_.b - x;
            dist_[i] = std::min(left, right);
            dist_s_[i] = std::pow(dist_[i], params_.s);
            // 2 ∫_{Ω^c} |x − y|^{−1−ps} dy
            tail_[i] = (2.0 / ps) * (std::pow(right, -ps) + std::pow(left, -ps));
        }
        kernel_.resize(n);
        kernel_[0] = 0.0;
        for (std::size_t k = 1; k < n; ++k) kernel_[k] = std::pow(static_cast<double>(k) * h_, -1.0 - ps);
    }

    const ProblemParams& params() const noexcept { return params_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    double spacing() const noexcept { return h_; }
    double p() const noexcept { return params_.p; }
    double s() const noexcept { return params_.s; }

    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& dist() const noexcept { return dist_; }
    const std::vector<double>& dist_s() const noexcept { return dist_s_; }
    const std::vector<double>& tail() const noexcept { return tail_; }

    /// |x_i − x_j|^{−1−ps}; zero on the diagonal.
    double kernel(std::size_t i, std::size_t j) const noexcept { return kernel_[i > j ? i - j : j - i]; }

    GridFunction constant(double c) const { return GridFunction(size(), c); }
    GridFunction zeros() const { return GridFunction(size(), 0.0); }

    template <typename Fn>
    GridFunction sample(Fn&& fn) const {
        GridFunction u(size());
        for (std::size_t i = 0; i < size(); ++i) u[i] = fn(nodes_[i]);
        return u;
    }

private:
    ProblemParams params_;
    double h_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> dist_;
    std::vector<double> dist_s_;
    std::vector<double> tail_;
    std::vector<double> kernel_;
};

inline Mesh build_mesh(const ProblemParams& params) { return Mesh(params); }

struct WeightedSup {
    double norm = 0.0;       ///< max |u_i| / d_i^s
    double min_ratio = 0.0;  ///< min u_i / d_i^s
    bool in_cone_interior() const noexcept { return min_ratio > 0.0; }
};

inline WeightedSup weighted_sup(const Mesh& mesh, const GridFunction& u) {
    require_same_size(u, mesh.size(), "weighted_sup");
    WeightedSup out{0.0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const double r = u[i] / mesh.dist_s()[i];
        out.norm = std::max(out.norm, std::abs(r));
        out.min_ratio = std::min(out.min_ratio, r);
    }
    if (mesh.size() == 0) out.min_ratio = 0.0;
    return out;
}

}  // namespace fraclap
