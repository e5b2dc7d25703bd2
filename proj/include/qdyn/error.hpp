#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qdyn {

enum class ErrorCode {
  InvalidArgument,
  DegreeTooHigh,
  BoundaryLeak,
  NotConverged,
  TruncationError,
  ThermostatDivergence,
  IllConditioned,
  BoundaryDominated,
  SupremumAtEdge,
  FlatCurvature,
  MinimumAtEdge,
  EnergyDrift,
  NonuniformGrid,
  ConfigError,
  ConvexityViolation,
};

std::string_view to_string(ErrorCode code) noexcept;

/// All library failures are reported through this exception type; `code()`
/// identifies the failure class so callers (the CLI in particular) can map
/// it onto exit codes and recovery strategies.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// The text without the code prefix, for rethrowing with added context.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace qdyn
