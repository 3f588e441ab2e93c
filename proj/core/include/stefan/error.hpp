#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stefan {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NegativeEntry,
  SumViolation,
  KernelViolation,
  SingularSystem,
  FloorViolation,
  EvaluationDomain,
  SimplexViolation,
  StepStalled,
  GridMismatch,
  NonPositiveH0,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::SumViolation: return "SumViolation";
    case ErrorCode::KernelViolation: return "KernelViolation";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::FloorViolation: return "FloorViolation";
    case ErrorCode::EvaluationDomain: return "EvaluationDomain";
    case ErrorCode::SimplexViolation: return "SimplexViolation";
    case ErrorCode::StepStalled: return "StepStalled";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonPositiveH0: return "NonPositiveH0";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace stefan
