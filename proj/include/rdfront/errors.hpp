#pragma once

#include <stdexcept>
#include <string>

namespace rdfront {

/// Invalid user input or configuration. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameter outside the range the model is defined for (e.g. n < 4).
class DomainError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// A numerical procedure failed to deliver a result. Maps to CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Both ends of a shooting bracket fell into the same class.
class BracketInvalid : public NumericError {
public:
    using NumericError::NumericError;
};

/// Adaptive quadrature exhausted its subdivision budget.
class QuadratureError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Archive could not be read or does not match the request.
class ArchiveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rdfront
