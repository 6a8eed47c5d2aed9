#include "netgame/error.hpp"

namespace netgame {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotInSet: return "NotInSet";
    case ErrorCode::InvalidSet: return "InvalidSet";
    case ErrorCode::SelfLoopForbidden: return "SelfLoopForbidden";
    case ErrorCode::WeightOutOfRange: return "WeightOutOfRange";
    case ErrorCode::InvalidGame: return "InvalidGame";
    case ErrorCode::InterventionSetExcludesOrigin: return "InterventionSetExcludesOrigin";
    case ErrorCode::NonMonotone: return "NonMonotone";
    case ErrorCode::MaxItersExceeded: return "MaxItersExceeded";
    case ErrorCode::UnsupportedActionSet: return "UnsupportedActionSet";
    case ErrorCode::Assumption2Violated: return "Assumption2Violated";
    case ErrorCode::Assumption3Infeasible: return "Assumption3Infeasible";
    case ErrorCode::WeakCouplingViolated: return "WeakCouplingViolated";
    case ErrorCode::FeedbackTargetOutsideInterventionSet:
      return "FeedbackTargetOutsideInterventionSet";
    case ErrorCode::AsymmetricNetwork: return "AsymmetricNetwork";
    case ErrorCode::ConstrainedAdaptive: return "ConstrainedAdaptive";
    case ErrorCode::MissingTarget: return "MissingTarget";
    case ErrorCode::TargetNotAssignable: return "TargetNotAssignable";
    case ErrorCode::MissingReference: return "MissingReference";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DegenerateNetwork: return "DegenerateNetwork";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace netgame
