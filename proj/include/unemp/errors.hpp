#pragma once

#include <stdexcept>
#include <string>

namespace unemp {

struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularEquilibrium : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when the adaptive integrator exceeds its step budget.
struct StepLimitError : std::runtime_error {
  double last_time;
  StepLimitError(const std::string& msg, double t)
      : std::runtime_error(msg), last_time(t) {}
};

// Raised when the right-hand side returns a non-finite value mid-integration.
struct BlowUpError : std::runtime_error {
  double last_good_time;
  BlowUpError(const std::string& msg, double t)
      : std::runtime_error(msg), last_good_time(t) {}
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace unemp
