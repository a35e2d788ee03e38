#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace stochlim {

/// Failure categories shared by every module. The CLI maps these onto exit codes.
enum class ErrorKind {
  capability,          // requested order/feature beyond what is implemented
  accuracy,            // a numerical tolerance could not be met
  unsupported_input,   // input outside the supported class (e.g. pole at a support edge)
  insufficient_data,   // too few usable points for a fit
  ill_conditioned,     // least-squares system too ill-conditioned to trust
  truncation_overflow, // Fock-space truncation level would be exceeded
  grid_mismatch,       // one-particle vectors on different grids
  config               // malformed or unknown configuration
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::capability: return "capability";
    case ErrorKind::accuracy: return "accuracy";
    case ErrorKind::unsupported_input: return "unsupported-input";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::ill_conditioned: return "ill-conditioned";
    case ErrorKind::truncation_overflow: return "truncation-overflow";
    case ErrorKind::grid_mismatch: return "grid-mismatch";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        double achieved = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what),
        kind_(kind),
        achieved_(achieved) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Achieved bound for accuracy errors (NaN otherwise).
  double achieved() const noexcept { return achieved_; }

 private:
  ErrorKind kind_;
  double achieved_;
};

}  // namespace stochlim
