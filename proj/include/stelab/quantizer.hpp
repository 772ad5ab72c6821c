#pragma once
#include <cmath>
#include <vector>

#include "stelab/errors.hpp"

namespace stelab {

enum class QuantKind { Identity, Uniform };

// Uniform symmetric quantizer on [-omega, omega] with L+1 = 2^b - 1 levels:
//   v_k   = -omega + k*Delta,          k = 0..L,   Delta = 2*omega/L
//   theta_k = -omega + (k - 1/2)*Delta, k = 1..L   (decision thresholds)
//   psi(x) = -omega + Delta * sum_k Theta(x - theta_k),  Theta(0) = 1
// temperature > 0 replaces each step by Phi((x - theta_k)/T).
struct QuantizerSpec {
  QuantKind kind = QuantKind::Uniform;
  int bits = 2;
  double range = 1.0;
  double temperature = 0.0;

  static QuantizerSpec identity() { return {QuantKind::Identity, 0, 0.0, 0.0}; }
  static QuantizerSpec uniform(int b, double omega, double T = 0.0) {
    return {QuantKind::Uniform, b, omega, T};
  }
};

struct QuantizerGrid {
  int L = 0;          // number of thresholds; L+1 levels
  double delta = 0.0;
  std::vector<double> levels;      // v_0..v_L
  std::vector<double> thresholds;  // theta_1..theta_L
};

class Quantizer {
 public:
  explicit Quantizer(const QuantizerSpec& spec);

  const QuantizerSpec& spec() const { return spec_; }
  const QuantizerGrid& grid() const { return grid_; }  // empty for identity
  bool is_identity() const { return spec_.kind == QuantKind::Identity; }
  bool is_hard() const { return is_identity() || spec_.temperature == 0.0; }

  double apply(double x) const {
    if (is_identity()) return x;
    return spec_.temperature == 0.0 ? hard(x) : soft(x);
  }

  // branchless nearest-level map equivalent to the threshold-sum definition
  // (ties x == theta_k round up); used directly in the simulator hot loop
  double hard(double x) const {
    double k = std::floor((x + spec_.range) * inv_delta_ + 0.5);
    k = k < 0.0 ? 0.0 : (k > grid_.L ? grid_.L : k);
    return k * grid_.delta - spec_.range;
  }

  double soft(double x) const;  // psi_T, temperature > 0

  // Gaussian input moments of the quantizer: kappa_psi = E[X psi(X)],
  // sigma_psi^2 = E[psi(X)^2], X ~ N(0,1). Closed form via pdf/cdf sums.
  void moments(double& kappa, double& sigma_sq) const;

  // independent route for the same moments: piecewise adaptive quadrature
  // split at the thresholds (oracle used by tests; hard quantizers only)
  void moments_quadrature(double& kappa, double& sigma_sq) const;

 private:
  QuantizerSpec spec_;
  QuantizerGrid grid_;
  double inv_delta_ = 0.0;
};

// ---- Gaussian smoothing kernels (X ~ N(m, s^2), temperature T >= 0) ----
// E[Phi((X-a)/T)], E[phi((X-a)/T)]*? scaled -- see each function.
// All reduce to the hard-threshold expressions at T = 0 (require s, T not
// both zero).

// E[ Phi((X-a)/T) ] = Phi((m-a)/sqrt(s^2+T^2))
double kernel_cdf(double m, double s, double a, double T);

// E[ phi((X-a)/T) ] = T/sqrt(s^2+T^2) * phi((m-a)/sqrt(s^2+T^2))
double kernel_pdf(double m, double s, double a, double T);

// E[ X * Phi((X-a)/T) ] = m*Phi(u) + s^2/sqrt(s^2+T^2) * phi(u)
double kernel_xcdf(double m, double s, double a, double T);

// E[ Phi((X-a)/T) * Phi((X-b)/T) ]; T = 0 gives Phi((m-max(a,b))/s),
// T > 0 is evaluated by adaptive quadrature (abs tol ~1e-12)
double kernel_cdf2(double m, double s, double a, double b, double T);

}  // namespace stelab
