#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netgame {

/// Failure categories raised by the library. Each has a stable name that the
/// CLI prints verbatim, so callers can match on it.
enum class ErrorCode {
  DimensionMismatch,
  NotInSet,
  InvalidSet,
  SelfLoopForbidden,
  WeightOutOfRange,
  InvalidGame,
  InterventionSetExcludesOrigin,
  NonMonotone,
  MaxItersExceeded,
  UnsupportedActionSet,
  Assumption2Violated,
  Assumption3Infeasible,
  WeakCouplingViolated,
  FeedbackTargetOutsideInterventionSet,
  AsymmetricNetwork,
  ConstrainedAdaptive,
  MissingTarget,
  TargetNotAssignable,
  MissingReference,
  Divergence,
  InvalidConfig,
  DegenerateNetwork,
  ParseError,
  IoError,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace netgame
