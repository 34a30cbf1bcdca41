#include "selfcma/error.hpp"

namespace selfcma {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveDefinite: return "NonPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::InvalidLambda: return "InvalidLambda";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::NonFiniteFitness: return "NonFiniteFitness";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace selfcma
