#pragma once

#include <stdexcept>
#include <string>

namespace geoharm {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed data passed to an operation (non-finite values, size mismatch,
/// asymmetric matrix, zero function where a direction is required).
class InputError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration or specification value (epsilon <= 0, bad mode,
/// out-of-range index, unknown config key).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Numerical factorization or spectral failure (Cholesky breakdown,
/// eigenvalue below the PSD tolerance).
class ConditioningError : public Error {
public:
    using Error::Error;
};

/// Structurally degenerate problem: kernel numerically zero, empty retained
/// spectrum, all embedding coordinates identical.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Point outside the domain guard of an objective function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Nystrom extension requested through an eigenvalue too small to divide by.
class ExtensionError : public Error {
public:
    using Error::Error;
};

} // namespace geoharm
