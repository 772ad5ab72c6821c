#pragma once
#include "stelab/ode.hpp"
#include "stelab/quantizer.hpp"

namespace stelab {

enum class Stability { Stable, Marginal, Unstable, None };
enum class Regime { Interior, Boundary, Saturated };

const char* to_string(Stability s);
const char* to_string(Regime r);

// where the target quantized overlap c sits in the level grid:
//   i = floor((c + omega)/Delta), p = frac((c + omega)/Delta)
// p in (0,1): Interior (fixed point wedged between levels v_i and v_{i+1});
// p == 0: Boundary (c coincides with a level); |c| >= omega: Saturated.
struct LevelPosition {
  int index = 0;
  double frac = 0.0;
  Regime regime = Regime::Interior;
  double theta_star = 0.0;  // active threshold theta_{i+1} (Interior only)
};

LevelPosition level_position(double c, const Quantizer& quant_w);

struct FixedPointConfig {
  QuantizerSpec quant_w = QuantizerSpec::identity();
  QuantizerSpec quant_x = QuantizerSpec::identity();
  TeacherSpec teacher;
  double eta = 0.01;
  double lambda = 0.0;
  double noise_var = 0.0;
  // use the main-text variant of the outer residual (no Delta factor, sum to
  // L-1) instead of the appendix form; kept for sensitivity checks only --
  // the appendix form is the one equivalent to ODE stationarity
  bool main_text_variant = false;
  int gh_nodes = 80;
};

struct FixedPointReport {
  double m_star = 0.0, q_star = 0.0, s_star = 0.0;
  double eps_g_star = 0.0;
  // Jacobian of the flow at the fixed point, row-major. Input-only closed
  // form uses (m, q) coordinates; the joint solver uses (m, s), where the
  // linearization is well-conditioned. Eigenvalues agree either way.
  double jac[4] = {0, 0, 0, 0};
  double eig_re[2] = {0, 0}, eig_im[2] = {0, 0};
  Stability stability = Stability::None;
  Regime regime = Regime::Interior;
  double eta_boundary = 0.0;  // input-only stability boundary 2(s^2+l)/s^4
  bool has_eta_boundary = false;
  double residual = 0.0;  // |G_eta(s*)| (joint) or 0 (closed form)
};

// identity weight quantizer: closed-form fixed point
//   m* = rho kappa/(sigma^2+lambda), q* from the quadratic balance, analytic
//   Jacobian, eigenvalues, and the learning-rate boundary
FixedPointReport input_only_fixed_point(const FixedPointConfig& cfg);

// inner solve: the m with m_psi(m, s) = c (bisection; m_psi is increasing in m)
double solve_m_given_s(double s, double c, const Quantizer& quant_w,
                       const TeacherMeasure& mu);

// outer residual whose root gives the self-consistent width:
//   G_eta(s) = (2 Delta s / chi) sum_{k=1..L} E_nu[phi((m(s)nu/rho - theta_k)/s)]
//              - eta eps_g(m(s), s),     chi = sigma^2/(sigma^2 + lambda)
double fixed_point_residual(double s, const FixedPointConfig& cfg);

// quantized-weight fixed point: solves m_psi = c jointly with G_eta(s) = 0,
// then classifies stability from the numerical Jacobian of the macroscopic
// flow. Saturated configurations (|c| >= omega sqrt(rho)) have no finite
// (m*, q*): those fields are NaN and only eps_g_star is meaningful.
FixedPointReport joint_fixed_point(const FixedPointConfig& cfg);

// small-eta expansion of the stationary error:
//   eps* = eps0 + correction + o(eta),
//   eps0 = rho + noise - 2 kappa c + sigma^2 c^2/rho (interior/boundary)
//   correction = sigma^2 Delta^2 p(1-p)  (0 at a boundary/saturated point)
struct SmallEtaExpansion {
  double c = 0.0;        // target overlap rho kappa/(sigma^2+lambda)
  double p = 0.0;        // fractional level position of c/sqrt(rho)
  Regime regime = Regime::Interior;
  double eps0 = 0.0;
  double correction = 0.0;
};

SmallEtaExpansion small_eta_asymptotics(const FixedPointConfig& cfg);

}  // namespace stelab
