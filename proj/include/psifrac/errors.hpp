#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace psifrac {

enum class ErrorCode {
  // caller supplied something outside a documented contract
  InvalidParameter,
  UnknownKind,
  DomainMismatch,
  TransformIneligible,
  AbscissaViolation,
  InvalidProblem,
  WindowTooSmall,
  // a numerical method could not deliver the requested accuracy
  AccuracyLoss,
  ToleranceNotMet,
  NeedsSmoothness,
  ContourFailure,
  UnboundedGrowth,
  SeriesDivergence,
  NoConvergence,
};

std::string_view to_string(ErrorCode code) noexcept;

// True when the failure is numerical (valid input, method gave up) rather
// than a rejected argument.
bool is_numeric_failure(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace psifrac
