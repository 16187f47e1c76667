#pragma once

#include <stdexcept>
#include <string>

namespace dyadic {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs with incompatible shapes (grid mismatch, wrong array size, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its documented domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A symbol or multiplier produced a non-finite value where one was needed.
class NumericDomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure (quadrature, bisection) failed to reach tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment or CLI configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dyadic
