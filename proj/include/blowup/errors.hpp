#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blowup {

enum class ErrorKind {
  NonPositiveEntry,
  DimensionMismatch,
  NegativeLambda,
  DegenerateWeight,
  ConvergenceFailure,
  WrongDimension,
  UnsupportedDimension,
  NotConverged,
  SizeMismatch,
  QuadratureFailure,
  SingularResolvent,
  SolverDiverged,
  EmptyRange,
  InsufficientRings,
  NotPositiveDefinite,
  NoConvergence,
  EllipticityViolation,
  InvalidArgument,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

/// True for errors caused by bad input rather than a numerical breakdown.
bool is_input_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace blowup
