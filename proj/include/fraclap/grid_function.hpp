#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fraclap {

/// Values at the interior nodes of a mesh; implicitly zero outside the domain.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(std::size_t n, double fill = 0.0) : values_(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), fill)) {}
    explicit GridFunction(Eigen::VectorXd values) : values_(std::move(values)) {}
    GridFunction(std::initializer_list<double> values) : values_(static_cast<Eigen::Index>(values.size())) {
        std::copy(values.begin(), values.end(), values_.data());
    }
    static GridFunction from(std::span<const double> values) {
        GridFunction g(values.size());
        std::copy(values.begin(), values.end(), g.values_.data());
        return g;
    }

    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
    double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
    double& operator[](std::size_t i) { return values_[static_cast<Eigen::Index>(i)]; }

    const Eigen::VectorXd& vec() const noexcept { return values_; }
    Eigen::VectorXd& vec() noexcept { return values_; }
    std::span<const double> span() const noexcept { return {values_.data(), size()}; }
    std::vector<double> to_vector() const { return {values_.data(), values_.data() + values_.size()}; }

    double sup_norm() const { return values_.size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff(); }
    double min() const { return values_.minCoeff(); }
    double max() const { return values_.maxCoeff(); }
    bool all_finite() const { return values_.allFinite(); }

    GridFunction& operator+=(const GridFunction& o) { values_ += o.values_; return *this; }
    GridFunction& operator-=(const GridFunction& o) { values_ -= o.values_; return *this; }
    GridFunction& operator*=(double c) { values_ *= c; return *this; }

    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator-(GridFunction a) { a.values_ = -a.values_; return a; }
    friend GridFunction operator*(double c, GridFunction a) { return a *= c; }
    friend GridFunction operator*(GridFunction a, double c) { return a *= c; }
    friend bool operator==(const GridFunction& a, const GridFunction& b) {
        return a.values_.size() == b.values_.size() && a.values_ == b.values_;
    }

private:
    Eigen::VectorXd values_;
};

inline void require_same_size(const GridFunction& a, std::size_t n, const char* what) {
    if (a.size() != n) {
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(n) + " nodes, got " +
                                    std::to_string(a.size()));
    }
}

inline double sup_distance(const GridFunction& a, const GridFunction& b) { return (a.vec() - b.vec()).cwiseAbs().maxCoeff(); }

/// Two critical points count as distinct when ‖u − v‖∞ > 1e-6·(1 + ‖u‖∞).
inline constexpr double kDedupRelTol = 1e-6;

inline bool same_point(const GridFunction& u, const GridFunction& v, double rel = kDedupRelTol) {
    return sup_distance(u, v) <= rel * (1.0 + u.sup_norm());
}

}  // namespace fraclap
