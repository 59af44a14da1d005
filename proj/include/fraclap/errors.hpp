#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "fraclap/grid_function.hpp"

namespace fraclap {

enum class ErrorKind { parameter, convergence, not_found, io, internal };

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::parameter: return "parameter";
        case ErrorKind::convergence: return "convergence";
        case ErrorKind::not_found: return "not_found";
        case ErrorKind::io: return "io";
        case ErrorKind::internal: return "internal";
    }
    return "unknown";
}

/// Process exit code associated with each error kind (CLI contract).
inline int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::parameter: return 2;
        case ErrorKind::convergence: return 3;
        case ErrorKind::not_found: return 4;
        case ErrorKind::io: return 5;
        case ErrorKind::internal: return 1;
    }
    return 1;
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error(ErrorKind::parameter, what) {}
};

/// Iterative solver gave up. Carries the best iterate seen so far.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, GridFunction best, double best_residual)
        : Error(ErrorKind::convergence, what), best_(std::move(best)), best_residual_(best_residual) {}

    const GridFunction& best_iterate() const noexcept { return best_; }
    double best_residual() const noexcept { return best_residual_; }

private:
    GridFunction best_;
    double best_residual_;
};

/// Newton linearization could not be factored.
class SingularJacobianError : public ConvergenceError {
public:
    SingularJacobianError(const std::string& what, GridFunction at, double rcond)
        : ConvergenceError(what, std::move(at), std::numeric_limits<double>::quiet_NaN()), rcond_(rcond) {}
    double reciprocal_condition() const noexcept { return rcond_; }

private:
    double rcond_;
};

/// The string collapsed onto one of its fixed endpoints.
class DegeneratePathError : public ConvergenceError {
public:
    DegeneratePathError(const std::string& what, GridFunction at)
        : ConvergenceError(what, std::move(at), std::numeric_limits<double>::quiet_NaN()) {}
};

class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& what) : Error(ErrorKind::not_found, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class InternalError : public Error {
public:
    explicit InternalError(const std::string& what) : Error(ErrorKind::internal, what) {}
};

}  // namespace fraclap
