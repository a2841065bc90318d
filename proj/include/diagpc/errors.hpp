#pragma once

#include <stdexcept>
#include <string>

namespace diagpc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Memory cap, exact-integer limit or wall-time budget exceeded (exit code 3).
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A numerical self-check failed: quadrature, Monte Carlo gate, inversion (exit code 4).
class NumericalAuditError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of an operation,
/// e.g. a nonpositive base of a complex power.
class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace diagpc
