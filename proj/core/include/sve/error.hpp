#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sve {

enum class ErrorKind {
  Domain,              // argument outside the mathematical domain
  Parameter,           // model or preset parameters rejected
  Configuration,       // inconsistent configuration (window, interval, keys)
  SingularCoefficient, // c vanishes or a coefficient is non-finite
  WindowTooWide,       // s' overflows on the requested window
  NotErgodic,          // speed measure has infinite mass
  Evaluation,          // user function returned a non-finite value
  Extrapolation,       // point lies outside the tabulated window
  Degenerate,          // zero variance, vanishing volatility, singular matrix
  Precision,           // quadrature did not reach the requested tolerance
  TailDivergence,      // integrand tails do not decay
  Simulation,          // too many flagged Monte Carlo paths
  InsufficientCycles,  // too few regeneration cycles in the horizon
  Unidentifiable,      // rank-deficient least-squares design
  Precondition,        // caller violated a documented precondition
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every numerical failure in the library is reported through this type.
/// The kind drives the CLI exit code.
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
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::Configuration: return "configuration error";
    case ErrorKind::SingularCoefficient: return "singular coefficient";
    case ErrorKind::WindowTooWide: return "window too wide";
    case ErrorKind::NotErgodic: return "not ergodic";
    case ErrorKind::Evaluation: return "evaluation error";
    case ErrorKind::Extrapolation: return "extrapolation error";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Precision: return "precision error";
    case ErrorKind::TailDivergence: return "tail divergence";
    case ErrorKind::Simulation: return "simulation error";
    case ErrorKind::InsufficientCycles: return "insufficient cycles";
    case ErrorKind::Unidentifiable: return "unidentifiable";
    case ErrorKind::Precondition: return "precondition violated";
  }
  return "error";
}

}  // namespace sve
