#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcmc {

enum class ErrorCode {
  // chain_core
  NonSquare,
  NegativeEntry,
  RowSumViolation,
  DuplicateLabel,
  UnknownState,
  NoReturnPath,
  NotIrreducible,
  PowerIterationDiverged,
  DimensionMismatch,
  // mixing
  Periodic,
  CapExceeded,
  // mh_sampler
  NaNDensity,
  InitFailure,
  ZeroWeight,
  EmptyTrace,
  NonPositiveScale,
  NumericalCheckFailed,
  // bayes
  OutOfDomain,
  EmptyGrid,
  AllDegenerate,
  UnknownLoss,
  NonNormalizedPosterior,
  // counting
  NodeCapExceeded,
  EmptySolutionSet,
  // shared
  InvalidArgument,
  Parse,
  Io,
};

/// Whether an error means "the input violates a precondition" or
/// "the computation itself failed". The CLI maps these to exit codes 2 and 3.
enum class ErrorCategory { Domain, Numeric };

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return mcmc::category(code_); }

 private:
  ErrorCode code_;
};

}  // namespace mcmc
