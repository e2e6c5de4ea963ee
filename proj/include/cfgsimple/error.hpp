// error.hpp - exception type shared by all cfgsimple modules.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cfgsimple {

enum class ErrorKind {
  OddSum,
  NegativeDegree,
  Empty,
  TooSmall,
  SideMismatch,
  Exhausted,
  TooLarge,
  SameVertex,
  OrderTooHigh,
  AssumptionViolated,
  InvalidArgument,
  Parse,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OddSum: return "OddSum";
    case ErrorKind::NegativeDegree: return "NegativeDegree";
    case ErrorKind::Empty: return "Empty";
    case ErrorKind::TooSmall: return "TooSmall";
    case ErrorKind::SideMismatch: return "SideMismatch";
    case ErrorKind::Exhausted: return "Exhausted";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::SameVertex: return "SameVertex";
    case ErrorKind::OrderTooHigh: return "OrderTooHigh";
    case ErrorKind::AssumptionViolated: return "AssumptionViolated";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

/// Thrown on any violated precondition. `kind()` names the violated invariant.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cfgsimple
