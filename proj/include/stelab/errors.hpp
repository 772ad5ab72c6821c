#pragma once
#include <stdexcept>
#include <string>

namespace stelab {

// Exit-code mapping used by the C API and the CLI:
//   0 success, 2 tolerance failure, 4 config error, 3 divergence.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ToleranceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& msg, double tau) : std::runtime_error(msg), tau(tau) {}
  double tau;  // time at which the blow-up was detected
};

struct CflError : std::runtime_error {
  CflError(const std::string& msg, double suggested_dt)
      : std::runtime_error(msg), suggested_dt(suggested_dt) {}
  double suggested_dt;
};

}  // namespace stelab
