#pragma once

#include <stdexcept>
#include <string>

namespace darcywave {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sample counts or truncation sizes that the transforms cannot handle.
class InvalidGridError : public Error {
public:
    using Error::Error;
};

/// Two fields that should live on the same grid do not.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A caller broke a documented precondition (e.g. non-mean-zero input).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operator.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The principal part lost ellipticity or the parameters make a symbol vanish.
class SingularOperatorError : public Error {
public:
    using Error::Error;
};

/// An iterative solve stopped without reaching its tolerance.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// The flattening map degenerated (vanishing Jacobian, lost injectivity).
class DegenerateMapError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or artifact file.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace darcywave
