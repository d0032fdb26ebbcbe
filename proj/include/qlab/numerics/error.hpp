#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qlab {

enum class ErrorKind {
  NoSignChange,
  PrecisionExhausted,
  PrecisionCapExceeded,
  DegenerateParameter,
  NotThreeComponents,
  ComponentCapExceeded,
  NotDiffeomorphic,
  CrossingNotFound,
  OrbitEscaped,
  DepthExceeded,
  DepthInsufficient,
  RootFindingStalled,
  NoEscapeWithinBudget,
  NotCoveredWithinBudget,
  Precondition,
  Format,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::PrecisionCapExceeded: return "PrecisionCapExceeded";
    case ErrorKind::DegenerateParameter: return "DegenerateParameter";
    case ErrorKind::NotThreeComponents: return "NotThreeComponents";
    case ErrorKind::ComponentCapExceeded: return "ComponentCapExceeded";
    case ErrorKind::NotDiffeomorphic: return "NotDiffeomorphic";
    case ErrorKind::CrossingNotFound: return "CrossingNotFound";
    case ErrorKind::OrbitEscaped: return "OrbitEscaped";
    case ErrorKind::DepthExceeded: return "DepthExceeded";
    case ErrorKind::DepthInsufficient: return "DepthInsufficient";
    case ErrorKind::RootFindingStalled: return "RootFindingStalled";
    case ErrorKind::NoEscapeWithinBudget: return "NoEscapeWithinBudget";
    case ErrorKind::NotCoveredWithinBudget: return "NotCoveredWithinBudget";
    case ErrorKind::Precondition: return "Precondition";
    case ErrorKind::Format: return "Format";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace qlab
