#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zeroopt {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  DimensionTooSmall,
  DegenerateBox,
  InvalidBox,
  InvalidInterval,
  NonFiniteValue,
  BudgetExceeded,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorKind::DegenerateBox: return "DegenerateBox";
    case ErrorKind::InvalidBox: return "InvalidBox";
    case ErrorKind::InvalidInterval: return "InvalidInterval";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace zeroopt
