#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace maslov {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not match (vector length, matrix size, field dimension).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Expression text could not be parsed.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " (at offset " + std::to_string(position) + ")"), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// An expression was evaluated outside the domain of one of its nodes.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A system or configuration could not be assembled (e.g. integrals not in involution).
class BuildError : public Error {
 public:
  using Error::Error;
};

enum class NumericalErrorKind {
  Ambiguity,           // corank estimates disagree
  WrongCorank,         // operation requires corank one
  NoConvergence,       // Newton or averaging did not converge
  CurveHitsSingularSet,
  UnresolvablePhase,   // refinement depth exhausted while unwrapping
  Inconsistency,       // rounding residual too large, parity violated
  Degenerate,          // tau too small for the requested operation
  NonTransverse,       // dependent projections onto the transverse plane
  IntegrationQuality,  // step underflow, invariant drift, symplecticity drift
  CompactnessViolation,
};

const char* to_string(NumericalErrorKind kind) noexcept;

/// A computation ran but its result cannot be trusted.
class NumericalError : public Error {
 public:
  NumericalError(NumericalErrorKind kind, const std::string& message)
      : Error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}
  NumericalErrorKind kind() const noexcept { return kind_; }

 private:
  NumericalErrorKind kind_;
};

}  // namespace maslov
