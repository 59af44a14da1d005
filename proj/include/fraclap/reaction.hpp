#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/grid_function.hpp"
#include "fraclap/mesh.hpp"
#include "fraclap/operator.hpp"

namespace fraclap {

/// A nonlinearity f(x_i, t) evaluated at mesh node i, with primitive F(x_i, t) = ∫_0^t f and ∂f/∂t.
class ReactionTerm {
public:
    virtual ~ReactionTerm() = default;
    virtual double value(std::size_t node, double t) const = 0;
    virtual double primitive(std::size_t node, double t) const = 0;
    virtual double derivative(std::size_t node, double t) const = 0;
    virtual std::string describe() const = 0;
};

/// Shared, immutable handle to a ReactionTerm.
class Reaction {
public:
    Reaction() = default;
    explicit Reaction(std::shared_ptr<const ReactionTerm> term) : term_(std::move(term)) {}

    double operator()(std::size_t node, double t) const { return term_->value(node, t); }
    double value(std::size_t node, double t) const { return term_->value(node, t); }
    double primitive(std::size_t node, double t) const { return term_->primitive(node, t); }
    double derivative(std::size_t node, double t) const { return term_->derivative(node, t); }
    std::string describe() const { return term_->describe(); }
    explicit operator bool() const noexcept { return static_cast<bool>(term_); }

    GridFunction evaluate(const GridFunction& u) const {
        GridFunction out(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = value(i, u[i]);
        return out;
    }
    GridFunction evaluate_derivative(const GridFunction& u) const {
        GridFunction out(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = derivative(i, u[i]);
        return out;
    }

private:
    std::shared_ptr<const ReactionTerm> term_;
};

namespace detail {

class FunctionTerm final : public ReactionTerm {
public:
    using Fn = std::function<double(double)>;
    FunctionTerm(Fn f, Fn primitive, Fn derivative, std::string name)
        : f_(std::move(f)), primitive_(std::move(primitive)), derivative_(std::move(derivative)), name_(std::move(name)) {}
    double value(std::size_t, double t) const override { return f_(t); }
    double primitive(std::size_t, double t) const override { return primitive_(t); }
    double derivative(std::size_t, double t) const override { return derivative_(t); }
    std::string describe() const override { return name_; }

private:
    Fn f_, primitive_, derivative_;
    std::string name_;
};

}  // namespace detail

/// x-independent reaction from explicit closed forms.
inline Reaction make_function_reaction(std::function<double(double)> f, std::function<double(double)> primitive,
                                       std::function<double(double)> derivative, std::string name = "function") {
    return Reaction(std::make_shared<detail::FunctionTerm>(std::move(f), std::move(primitive), std::move(derivative),
                                                           std::move(name)));
}

inline Reaction zero_reaction() {
    return make_function_reaction([](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; },
                                  "zero");
}

/// f(t) = c φ_p(t)
inline Reaction power_reaction(double coefficient, double p) {
    return make_function_reaction([=](double t) { return coefficient * phi(t, p); },
                                  [=](double t) { return coefficient * std::pow(std::abs(t), p) / p; },
                                  [=](double t) { return coefficient * (p - 1.0) * std::pow(std::abs(t), p - 2.0); },
                                  "power(c=" + std::to_string(coefficient) + ")");
}

inline Reaction exponential_reaction() {
    return make_function_reaction([](double t) { return std::exp(t); }, [](double t) { return std::expm1(t); },
                                  [](double t) { return std::exp(t); }, "exp");
}

/// f(t) = μ φ_p(t) − κ |t|^{q−2} t: (p−1)-linear at the origin with slope μ, dissipative at infinity.
struct ModelReaction {
    double mu = 1.0;
    double kappa = 1.0;
    double p = 2.0;
    double q = 3.0;

    double value(double t) const { return mu * phi(t, p) - kappa * phi(t, q); }
    double primitive(double t) const {
        const double a = std::abs(t);
        return mu * std::pow(a, p) / p - kappa * std::pow(a, q) / q;
    }
    double derivative(double t) const { return mu * phi_prime(t, p) - kappa * (q - 1.0) * std::pow(std::abs(t), q - 2.0); }

    /// c0 with |f(t)| ≤ c0 (1 + |t|^{q−1}) for all t.
    double growth_constant() const { return std::abs(mu) + std::abs(kappa); }

    Reaction reaction() const {
        const ModelReaction m = *this;
        return make_function_reaction([m](double t) { return m.value(t); }, [m](double t) { return m.primitive(t); },
                                      [m](double t) { return m.derivative(t); },
                                      "model(mu=" + std::to_string(mu) + ",kappa=" + std::to_string(kappa) + ",p=" +
                                          std::to_string(p) + ",q=" + std::to_string(q) + ")");
    }
};

/// f frozen at node-wise bounds: f̃(x_i, t) = f(x_i, clamp(t, lower_i, upper_i)).
class TruncatedReaction final : public ReactionTerm {
public:
    TruncatedReaction(Reaction base, std::vector<double> lower, std::vector<double> upper)
        : base_(std::move(base)), lower_(std::move(lower)), upper_(std::move(upper)) {
        offset_.resize(lower_.size());
        for (std::size_t i = 0; i < lower_.size(); ++i) offset_[i] = antiderivative(i, 0.0);
    }

    double value(std::size_t node, double t) const override { return base_.value(node, clamp(node, t)); }

    double primitive(std::size_t node, double t) const override { return antiderivative(node, t) - offset_[node]; }

    double derivative(std::size_t node, double t) const override {
        if (t < lower_[node] || t > upper_[node]) return 0.0;
        return base_.derivative(node, t);
    }

    std::string describe() const override { return "truncated(" + base_.describe() + ")"; }

    const Reaction& base() const noexcept { return base_; }
    double lower(std::size_t node) const { return lower_[node]; }
    double upper(std::size_t node) const { return upper_[node]; }

private:
    double clamp(std::size_t node, double t) const { return std::clamp(t, lower_[node], upper_[node]); }

    // F(clamp(t)) + f(bound)(t − bound): an antiderivative of the clamped reaction.
    double antiderivative(std::size_t node, double t) const {
        const double c = clamp(node, t);
        double out = base_.primitive(node, c);
        if (t != c) out += base_.value(node, c) * (t - c);
        return out;
    }

    Reaction base_;
    std::vector<double> lower_, upper_, offset_;
};

namespace detail {

/// f(x, clamp(t, lo, hi)) with the same bounds at every node.
class UniformClampTerm final : public ReactionTerm {
public:
    UniformClampTerm(Reaction base, double lo, double hi, std::string name)
        : base_(std::move(base)), lo_(lo), hi_(hi), name_(std::move(name)) {}
    double value(std::size_t node, double t) const override { return base_.value(node, std::clamp(t, lo_, hi_)); }
    double primitive(std::size_t node, double t) const override {
        return antiderivative(node, t) - antiderivative(node, 0.0);
    }
    double derivative(std::size_t node, double t) const override {
        if (t < lo_ || t > hi_) return 0.0;
        return base_.derivative(node, t);
    }
    std::string describe() const override { return name_ + "(" + base_.describe() + ")"; }

private:
    double antiderivative(std::size_t node, double t) const {
        const double c = std::clamp(t, lo_, hi_);
        double out = base_.primitive(node, c);
        if (t != c) out += base_.value(node, c) * (t - c);
        return out;
    }
    Reaction base_;
    double lo_, hi_;
    std::string name_;
};

}  // namespace detail

/// f_+(x, t) = f(x, t⁺)
inline Reaction positive_truncation(const Reaction& base) {
    return Reaction(std::make_shared<detail::UniformClampTerm>(base, 0.0, std::numeric_limits<double>::infinity(), "positive_part"));
}

/// f_−(x, t) = f(x, −t⁻)
inline Reaction negative_truncation(const Reaction& base) {
    return Reaction(std::make_shared<detail::UniformClampTerm>(base, -std::numeric_limits<double>::infinity(), 0.0, "negative_part"));
}

/// f̃ on the order interval [lower, upper]. Throws ParameterError at the first node with lower > upper.
inline Reaction interval_truncation(const Reaction& base, const GridFunction& lower, const GridFunction& upper) {
    if (lower.size() != upper.size()) throw ParameterError("interval_truncation: bound sizes differ");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!(lower[i] <= upper[i])) {
            throw ParameterError("interval_truncation: lower > upper at node " + std::to_string(i) + " (" +
                                 std::to_string(lower[i]) + " > " + std::to_string(upper[i]) + ")");
        }
    }
    return Reaction(std::make_shared<TruncatedReaction>(base, lower.to_vector(), upper.to_vector()));
}

/// Bound c0 (1 + |lower_i|^{q−1} + |upper_i|^{q−1}) satisfied by the interval truncation at node i.
inline double truncation_bound(double c0, double q, double lower, double upper) {
    return c0 * (1.0 + std::pow(std::abs(lower), q - 1.0) + std::pow(std::abs(upper), q - 1.0));
}

namespace detail {

class ReflectedTerm final : public ReactionTerm {
public:
    explicit ReflectedTerm(Reaction base) : base_(std::move(base)) {}
    double value(std::size_t node, double t) const override { return -base_.value(node, -t); }
    double primitive(std::size_t node, double t) const override { return base_.primitive(node, -t); }
    double derivative(std::size_t node, double t) const override { return base_.derivative(node, -t); }
    std::string describe() const override { return "reflected(" + base_.describe() + ")"; }

private:
    Reaction base_;
};

}  // namespace detail

/// g(x, t) = −f(x, −t): u solves the problem for f iff −u solves it for g.
inline Reaction reflect(const Reaction& base) { return Reaction(std::make_shared<detail::ReflectedTerm>(base)); }

/// Nondecreasing Lipschitz cut-off: 0 for t ≤ 0, t/ε on (0, ε), 1 for t ≥ ε.
inline double tau_eps(double eps, double t) {
    if (!(eps > 0.0)) throw ParameterError("tau_eps: eps must be positive");
    if (t <= 0.0) return 0.0;
    if (t >= eps) return 1.0;
    return t / eps;
}

struct GrowthReport {
    double max_ratio = 0.0;
    double worst_t = 0.0;
    std::size_t worst_node = 0;
    bool passed = true;
};

/// Samples |f(x_i, t)| / (c0 (1 + |t|^{q−1})) over the mesh nodes and a symmetric logarithmic t-grid in [−1e4, 1e4].
inline GrowthReport growth_check(const Reaction& r, const ProblemParams& params, std::size_t sample_count) {
    if (sample_count < 1) throw ParameterError("growth_check: sample_count must be positive");
    const Mesh mesh(params);
    std::vector<double> ts{0.0};
    for (std::size_t k = 0; k < sample_count; ++k) {
        const double e = sample_count == 1 ? 4.0 : -4.0 + 8.0 * static_cast<double>(k) / static_cast<double>(sample_count - 1);
        const double t = std::pow(10.0, e);
        ts.push_back(t);
        ts.push_back(-t);
    }
    GrowthReport rep;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        for (double t : ts) {
            const double f = r.value(i, t);
            const double bound = params.c0 * (1.0 + std::pow(std::abs(t), params.q - 1.0));
            double ratio = std::abs(f) / bound;
            if (std::isnan(ratio)) ratio = std::numeric_limits<double>::infinity();
            if (ratio > rep.max_ratio) {
                rep.max_ratio = ratio;
                rep.worst_t = t;
                rep.worst_node = i;
            }
        }
    }
    rep.passed = rep.max_ratio <= 1.0 + 1e-9;
    return rep;
}

/// Sampled estimate of the slope f(x, t)/φ_p(t) at t = ±probe, min and max over nodes and signs.
struct OriginSlope {
    double min = 0.0;
    double max = 0.0;
};

inline OriginSlope origin_slope(const Reaction& r, std::size_t nodes, double p, double probe = 1e-4) {
    OriginSlope out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < nodes; ++i) {
        for (double t : {probe, -probe}) {
            const double slope = r.value(i, t) / phi(t, p);
            out.min = std::min(out.min, slope);
            out.max = std::max(out.max, slope);
        }
    }
    return out;
}

}  // namespace fraclap
