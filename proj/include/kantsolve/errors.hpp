#pragma once

#include <stdexcept>
#include <string>

namespace kantsolve {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A Kantorovich hypothesis fails for the given data (e.g. 2bL > 1).
class HypothesisViolated : public Error {
public:
    using Error::Error;
};

/// A scalar argument lies outside the interval on which the operation is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A point (or finite-difference probe) leaves the problem domain B[x0, R].
class DomainViolation : public Error {
public:
    using Error::Error;
};

/// Requested builtin problem name is not in the registry.
class UnknownProblem : public Error {
public:
    using Error::Error;
};

/// F'(x0) is singular or numerically too ill-conditioned to factor.
class SingularBasePoint : public Error {
public:
    using Error::Error;
};

/// The Jacobian at the current iterate is numerically singular.
class SingularJacobian : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent caller input.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A trace is too short for the requested verification.
class InsufficientTrace : public Error {
public:
    using Error::Error;
};

} // namespace kantsolve
