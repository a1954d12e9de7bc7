#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace idr {

enum class ErrorCode {
  kNonFiniteInput,
  kDimensionMismatch,
  kNonPositiveAlpha,
  kInvalidK,
  kInvalidConfig,
  kNotNormalized,
  kInvalidSpec,
  kInvalidFraction,
  kLengthMismatch,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// True for errors caused by bad user input rather than the environment.
inline bool is_validation_error(ErrorCode code) {
  return code != ErrorCode::kIoError;
}

}  // namespace idr
