#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace papertab {

enum class ErrorCode {
  DegenerateQuad,
  SingularSystem,
  PointAtInfinity,
  InvalidConfig,
  EmptyMask,
  QuadFitFailed,
  NoPaperFound,
  DimensionMismatch,
  IoError,
  InvalidSpec,
  EmptyBatch,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateQuad: return "DegenerateQuad";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::PointAtInfinity: return "PointAtInfinity";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::QuadFitFailed: return "QuadFitFailed";
    case ErrorCode::NoPaperFound: return "NoPaperFound";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the pipeline's hold-last-quad policy, the CLI exit codes) can
/// branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace papertab
