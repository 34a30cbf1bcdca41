#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace selfcma {

enum class ErrorCode {
  NonPositiveDefinite,
  DimensionMismatch,
  InvalidRange,
  InvalidDimension,
  InvalidLambda,
  NonFiniteState,
  NonFiniteFitness,
  EmptyInput,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` tells callers which
/// failure they are looking at (e.g. a restart driver reacts to
/// NonPositiveDefinite but rethrows everything else).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace selfcma
