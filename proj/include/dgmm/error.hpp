#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dgmm {

enum class ErrorKind {
  NotDoubleWell,
  NonWellTails,
  NoConvergence,
  HypothesisViolated,
  NotAdmissible,
  MidpointMismatch,
  MidpointTooFar,
  BoundaryViolation,
  DegenerateField,
  LayerTooWide,
  InvalidBounds,
  BudgetExceeded,
  NoSlice,
  BetaOutOfRange,
  InvalidInput,
};

constexpr std::string_view error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotDoubleWell: return "NotDoubleWell";
    case ErrorKind::NonWellTails: return "NonWellTails";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::NotAdmissible: return "NotAdmissible";
    case ErrorKind::MidpointMismatch: return "MidpointMismatch";
    case ErrorKind::MidpointTooFar: return "MidpointTooFar";
    case ErrorKind::BoundaryViolation: return "BoundaryViolation";
    case ErrorKind::DegenerateField: return "DegenerateField";
    case ErrorKind::LayerTooWide: return "LayerTooWide";
    case ErrorKind::InvalidBounds: return "InvalidBounds";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NoSlice: return "NoSlice";
    case ErrorKind::BetaOutOfRange: return "BetaOutOfRange";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace dgmm
