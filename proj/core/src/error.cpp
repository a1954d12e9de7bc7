#include "idr/error.hpp"

namespace idr {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonPositiveAlpha: return "NonPositiveAlpha";
    case ErrorCode::kInvalidK: return "InvalidK";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kInvalidFraction: return "InvalidFraction";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code) {}

}  // namespace idr
