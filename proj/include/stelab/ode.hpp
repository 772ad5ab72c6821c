#pragma once
#include <vector>

#include "stelab/model.hpp"
#include "stelab/quantizer.hpp"
#include "stelab/simulator.hpp"

namespace stelab {

// E_{w*}[.] as a finite node/weight rule: exact for discrete teachers,
// Gauss-Hermite for the Gaussian one
struct TeacherMeasure {
  std::vector<double> nodes, weights;
  double rho = 1.0;
  static TeacherMeasure from(const TeacherSpec& spec, int gh_nodes = 80);
};

// overlaps of the quantized weights under the isotropic Gaussian ansatz
//   w_i | w*_i ~ N(m w*_i / rho, s^2)
struct IsoMoments {
  double m_psi = 0.0, q_psi = 0.0, r_psi = 0.0;
};

// closed form via the Gaussian smoothing kernels (any temperature; the
// temperature-0 hard case uses the exact threshold expressions)
IsoMoments iso_moments(double m, double s, const Quantizer& quant_w,
                       const TeacherMeasure& mu);

// independent route: piecewise adaptive quadrature of psi against the
// conditional Gaussian (oracle used by tests)
IsoMoments iso_moments_quadrature(double m, double s, const Quantizer& quant_w,
                                  const TeacherMeasure& mu);

struct OdeConfig {
  QuantizerSpec quant_w = QuantizerSpec::uniform(2, 1.0);
  QuantizerSpec quant_x = QuantizerSpec::identity();
  TeacherSpec teacher;
  double eta = 0.05;
  double lambda = 0.0;
  double noise_var = 0.0;
  double m0 = 0.0;
  double q0 = 1.0;
  double horizon_tau = 100.0;
  double dtau = 0.01;
  double record_stride_tau = 0.1;
  double s_floor = 1e-10;  // clamp for s = sqrt(q - m^2/rho)
  int gh_nodes = 80;
};

// the macroscopic flow (Theorem 5.1):
//   dm/dtau = -eta ((sigma_x^2 + lambda) m_psi - kappa_x rho)
//   dq/dtau = -2 eta ((sigma_x^2 + lambda) r_psi - kappa_x m)
//             + eta^2 sigma_x^2 eps_g(m, q)
class OdeSystem {
 public:
  explicit OdeSystem(const OdeConfig& cfg);
  void rhs(double m, double q, double& dm, double& dq) const;
  MacroState observables(double m, double q, double tau) const;
  double kappa_x() const { return kx_; }
  double sigma_sq_x() const { return sx2_; }
  const Quantizer& quant_w() const { return qw_; }
  const TeacherMeasure& measure() const { return mu_; }
  const OdeConfig& config() const { return cfg_; }

 private:
  OdeConfig cfg_;
  Quantizer qw_;
  TeacherMeasure mu_;
  double kx_ = 1.0, sx2_ = 1.0;
};

// fixed-step RK4; divergence (non-finite or q > 1e12) returns the partial
// trajectory with diverged = true
Trajectory integrate_ode(const OdeConfig& cfg);

}  // namespace stelab
