#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lanebev {

enum class ErrorCode {
  DegenerateDepth,
  EmptyInput,
  MixedImageSizes,
  DegenerateConfiguration,
  SingularHomography,
  InvalidArgument,
  TooManyInstances,
  ShapeMismatch,
  InsufficientRank,
  DegenerateAbscissae,
  BadMagic,
  TruncatedPayload,
  UnsupportedVersion,
  InvalidShape,
  MissingField,
  InvalidField,
  NonOrthonormalRotation,
  MalformedJson,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateDepth: return "DegenerateDepth";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MixedImageSizes: return "MixedImageSizes";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::SingularHomography: return "SingularHomography";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TooManyInstances: return "TooManyInstances";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InsufficientRank: return "InsufficientRank";
    case ErrorCode::DegenerateAbscissae: return "DegenerateAbscissae";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::InvalidField: return "InvalidField";
    case ErrorCode::NonOrthonormalRotation: return "NonOrthonormalRotation";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every domain failure raised by the library carries one of the named codes
/// above; callers switch on code() rather than parsing what().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace lanebev
