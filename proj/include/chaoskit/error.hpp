#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chaoskit {

enum class ErrorCode {
  AllDiagonal,
  BadIndex,
  BadFamilyParams,
  ShapeMismatch,
  OddGround,
  TooLarge,
  NotStandardized,
  NoSampler,
  OutsideTheoremClass,
  ParseError,
  IoError,
  UsageError,
};

constexpr std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::AllDiagonal: return "AllDiagonal";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::BadFamilyParams: return "BadFamilyParams";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::OddGround: return "OddGround";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NotStandardized: return "NotStandardized";
    case ErrorCode::NoSampler: return "NoSampler";
    case ErrorCode::OutsideTheoremClass: return "OutsideTheoremClass";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

/// Domain error carrying a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace chaoskit
