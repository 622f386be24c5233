#include "blowup/errors.hpp"

namespace blowup {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveEntry: return "NonPositiveEntry";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NegativeLambda: return "NegativeLambda";
    case ErrorKind::DegenerateWeight: return "DegenerateWeight";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::WrongDimension: return "WrongDimension";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::SingularResolvent: return "SingularResolvent";
    case ErrorKind::SolverDiverged: return "SolverDiverged";
    case ErrorKind::EmptyRange: return "EmptyRange";
    case ErrorKind::InsufficientRings: return "InsufficientRings";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::EllipticityViolation: return "EllipticityViolation";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

bool is_input_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveEntry:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::NegativeLambda:
    case ErrorKind::DegenerateWeight:
    case ErrorKind::WrongDimension:
    case ErrorKind::UnsupportedDimension:
    case ErrorKind::SizeMismatch:
    case ErrorKind::EmptyRange:
    case ErrorKind::NotPositiveDefinite:
    case ErrorKind::EllipticityViolation:
    case ErrorKind::InvalidArgument:
    case ErrorKind::ParseError:
      return true;
    default:
      return false;
  }
}

}  // namespace blowup
