#include "mcmc/errors.hpp"

namespace mcmc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::RowSumViolation: return "RowSumViolation";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::UnknownState: return "UnknownState";
    case ErrorCode::NoReturnPath: return "NoReturnPath";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::PowerIterationDiverged: return "PowerIterationDiverged";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Periodic: return "Periodic";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::NaNDensity: return "NaNDensity";
    case ErrorCode::InitFailure: return "InitFailure";
    case ErrorCode::ZeroWeight: return "ZeroWeight";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::NonPositiveScale: return "NonPositiveScale";
    case ErrorCode::NumericalCheckFailed: return "NumericalCheckFailed";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::AllDegenerate: return "AllDegenerate";
    case ErrorCode::UnknownLoss: return "UnknownLoss";
    case ErrorCode::NonNormalizedPosterior: return "NonNormalizedPosterior";
    case ErrorCode::NodeCapExceeded: return "NodeCapExceeded";
    case ErrorCode::EmptySolutionSet: return "EmptySolutionSet";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

ErrorCategory category(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::PowerIterationDiverged:
    case ErrorCode::CapExceeded:
    case ErrorCode::NaNDensity:
    case ErrorCode::InitFailure:
    case ErrorCode::AllDegenerate:
    case ErrorCode::NodeCapExceeded:
    case ErrorCode::NumericalCheckFailed:
      return ErrorCategory::Numeric;
    default:
      return ErrorCategory::Domain;
  }
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace mcmc
