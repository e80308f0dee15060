#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace frontier {

/// Hard error categories. In-band estimator failures use `Status` instead.
enum class ErrorCode {
  DimensionMismatch,
  EmptyConditioningSet,
  OutOfRange,
  InvalidArgument,
  NonpositiveThresholdValue,
  InsufficientStableRange,
  ParseError,
  ConfigError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyConditioningSet: return "EmptyConditioningSet";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonpositiveThresholdValue: return "NonpositiveThresholdValue";
    case ErrorCode::InsufficientStableRange: return "InsufficientStableRange";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Outcome of an estimator evaluation that completed its preconditions.
enum class Status {
  Ok,
  DegenerateSpacings,   // zero spacing or degenerate ratio among the top order statistics
  NonpositiveEstimate,  // tail index estimate outside (0, inf); raw value kept
};

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::DegenerateSpacings: return "DegenerateSpacings";
    case Status::NonpositiveEstimate: return "NonpositiveEstimate";
  }
  return "unknown";
}

}  // namespace frontier
