#pragma once

#include <stdexcept>
#include <string>

namespace entropic {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative method exhausted its budget without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument below the validity floor of the special-function layer
/// (e.g. s < 1e-12 in the convexity scan).
class NumericalFloorError : public DomainError {
public:
    using DomainError::DomainError;
};

namespace detail {

[[noreturn]] inline void domain_fail(const std::string& where, const std::string& what) {
    throw DomainError(where + ": " + what);
}

}  // namespace detail
}  // namespace entropic
