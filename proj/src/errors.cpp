#include "psifrac/errors.hpp"

namespace psifrac {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::TransformIneligible: return "TransformIneligible";
    case ErrorCode::AbscissaViolation: return "AbscissaViolation";
    case ErrorCode::InvalidProblem: return "InvalidProblem";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::AccuracyLoss: return "AccuracyLoss";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::NeedsSmoothness: return "NeedsSmoothness";
    case ErrorCode::ContourFailure: return "ContourFailure";
    case ErrorCode::UnboundedGrowth: return "UnboundedGrowth";
    case ErrorCode::SeriesDivergence: return "SeriesDivergence";
    case ErrorCode::NoConvergence: return "NoConvergence";
  }
  return "Unknown";
}

bool is_numeric_failure(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::AccuracyLoss:
    case ErrorCode::ToleranceNotMet:
    case ErrorCode::NeedsSmoothness:
    case ErrorCode::ContourFailure:
    case ErrorCode::UnboundedGrowth:
    case ErrorCode::SeriesDivergence:
    case ErrorCode::NoConvergence:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace psifrac
