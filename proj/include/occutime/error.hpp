#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace occutime {

enum class ErrorCode {
  InvalidArgument,
  NegativeRate,
  NonConservative,
  Reducible,
  SingularSystem,
  PoleAtS,
  ZeroDenominator,
  ZeroH,
  NonFiniteResult,
  Overflow,
  EigFailure,
  InsufficientMoments,
  DegenerateMeasure,
  NonConverged,
  HorizonMismatch,
};

std::string_view to_string(ErrorCode code);

// Errors that stem from bad input rather than a numerical breakdown.
constexpr bool is_config_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::NegativeRate:
    case ErrorCode::NonConservative:
    case ErrorCode::Reducible:
    case ErrorCode::HorizonMismatch:
    case ErrorCode::InsufficientMoments:
    case ErrorCode::DegenerateMeasure:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace occutime
