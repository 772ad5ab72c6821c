#include "stelab/ode.hpp"

#include <algorithm>
#include <cmath>

#include "stelab/errors.hpp"
#include "stelab/quadrature.hpp"
#include "stelab/special.hpp"

namespace stelab {

TeacherMeasure TeacherMeasure::from(const TeacherSpec& spec, int gh_nodes) {
  TeacherMeasure mu;
  mu.rho = spec.rho;
  const double r = std::sqrt(spec.rho);
  switch (spec.dist) {
    case TeacherDist::Ones:
      mu.nodes = {r};
      mu.weights = {1.0};
      break;
    case TeacherDist::Rademacher:
      mu.nodes = {-r, r};
      mu.weights = {0.5, 0.5};
      break;
    case TeacherDist::Gaussian: {
      gauss_hermite(gh_nodes, mu.nodes, mu.weights);
      for (auto& x : mu.nodes) x *= r;
      break;
    }
  }
  return mu;
}

IsoMoments iso_moments(double m, double s, const Quantizer& qw, const TeacherMeasure& mu) {
  IsoMoments out;
  if (qw.is_identity()) {
    out.m_psi = m;
    out.q_psi = out.r_psi = s * s + m * m / mu.rho;
    return out;
  }
  const auto& g = qw.grid();
  const double omega = qw.spec().range;
  const double T = qw.spec().temperature;
  for (std::size_t n = 0; n < mu.nodes.size(); ++n) {
    const double nu = mu.nodes[n], wt = mu.weights[n];
    const double mz = m * nu / mu.rho;  // conditional mean of w_i given w*_i = nu
    // m_psi: E[psi_T(z)] = -omega + Delta sum_k Phi-kernel
    double mean_psi = -omega;
    for (double th : g.thresholds) mean_psi += g.delta * kernel_cdf(mz, s, th, T);
    out.m_psi += wt * nu * mean_psi;
    // r_psi: E[z psi_T(z)] = -omega mz + Delta sum_k E[z Phi((z-th)/T)]
    double rz = -omega * mz;
    for (double th : g.thresholds) rz += g.delta * kernel_xcdf(mz, s, th, T);
    out.r_psi += wt * rz;
    // q_psi: E[psi_T(z)^2]
    if (T == 0.0) {
      // exact hard form: v_0^2 + sum_k (v_k^2 - v_{k-1}^2) Phi((mz-th_k)/s)
      double qz = g.levels[0] * g.levels[0];
      for (int k = 1; k <= g.L; ++k)
        qz += (g.levels[k] * g.levels[k] - g.levels[k - 1] * g.levels[k - 1]) *
              kernel_cdf(mz, s, g.thresholds[k - 1], 0.0);
      out.q_psi += wt * qz;
    } else {
      double qz = omega * omega;
      for (double th : g.thresholds) qz -= 2.0 * omega * g.delta * kernel_cdf(mz, s, th, T);
      for (int i = 0; i < g.L; ++i) {
        qz += g.delta * g.delta * kernel_cdf2(mz, s, g.thresholds[i], g.thresholds[i], T);
        for (int j = i + 1; j < g.L; ++j)
          qz += 2.0 * g.delta * g.delta *
                kernel_cdf2(mz, s, g.thresholds[i], g.thresholds[j], T);
      }
      out.q_psi += wt * qz;
    }
  }
  return out;
}

IsoMoments iso_moments_quadrature(double m, double s, const Quantizer& qw,
                                  const TeacherMeasure& mu) {
  IsoMoments out;
  if (qw.is_identity()) {
    out.m_psi = m;
    out.q_psi = out.r_psi = s * s + m * m / mu.rho;
    return out;
  }
  const double T = qw.spec().temperature;
  for (std::size_t n = 0; n < mu.nodes.size(); ++n) {
    const double nu = mu.nodes[n], wt = mu.weights[n];
    const double mz = m * nu / mu.rho;
    auto psi = [&](double z) { return qw.apply(z); };
    auto dens = [&](double z) { return norm_pdf((z - mz) / s) / s; };
    // split at the thresholds for the discontinuous hard case
    std::vector<double> pts{mz - 12.0 * s};
    if (T == 0.0)
      for (double th : qw.grid().thresholds)
        if (th > pts.front() && th < mz + 12.0 * s) pts.push_back(th);
    pts.push_back(mz + 12.0 * s);
    std::sort(pts.begin(), pts.end());
    double e1 = 0.0, e2 = 0.0, ez = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      e1 += integrate_adaptive([&](double z) { return psi(z) * dens(z); }, pts[i],
                               pts[i + 1], 1e-12);
      e2 += integrate_adaptive([&](double z) { return psi(z) * psi(z) * dens(z); }, pts[i],
                               pts[i + 1], 1e-12);
      ez += integrate_adaptive([&](double z) { return z * psi(z) * dens(z); }, pts[i],
                               pts[i + 1], 1e-12);
    }
    out.m_psi += wt * nu * e1;
    out.q_psi += wt * e2;
    out.r_psi += wt * ez;
  }
  return out;
}

OdeSystem::OdeSystem(const OdeConfig& cfg)
    : cfg_(cfg), qw_(cfg.quant_w), mu_(TeacherMeasure::from(cfg.teacher, cfg.gh_nodes)) {
  if (!(cfg.eta > 0.0)) throw ConfigError("ode: eta must be > 0");
  if (!(cfg.lambda >= 0.0)) throw ConfigError("ode: lambda must be >= 0");
  if (!(cfg.s_floor > 0.0)) throw ConfigError("ode: s_floor must be > 0");
  Quantizer qx(cfg.quant_x);
  qx.moments(kx_, sx2_);
}

void OdeSystem::rhs(double m, double q, double& dm, double& dq) const {
  const double rho = mu_.rho;
  const double s = std::max(cfg_.s_floor, std::sqrt(std::max(0.0, q - m * m / rho)));
  const IsoMoments im = iso_moments(m, s, qw_, mu_);
  const double eps =
      generalization_error(kx_, sx2_, im.m_psi, im.q_psi, rho, cfg_.noise_var);
  const double a = sx2_ + cfg_.lambda;
  dm = -cfg_.eta * (a * im.m_psi - kx_ * rho);
  dq = -2.0 * cfg_.eta * (a * im.r_psi - kx_ * m) + cfg_.eta * cfg_.eta * sx2_ * eps;
}

MacroState OdeSystem::observables(double m, double q, double tau) const {
  const double rho = mu_.rho;
  const double s = std::max(cfg_.s_floor, std::sqrt(std::max(0.0, q - m * m / rho)));
  const IsoMoments im = iso_moments(m, s, qw_, mu_);
  MacroState st;
  st.tau = tau;
  st.m = m;
  st.q = q;
  st.s = s;
  st.m_psi = im.m_psi;
  st.q_psi = im.q_psi;
  st.r_psi = im.r_psi;
  st.eps_g = generalization_error(kx_, sx2_, im.m_psi, im.q_psi, rho, cfg_.noise_var);
  return st;
}

Trajectory integrate_ode(const OdeConfig& cfg) {
  if (!(cfg.dtau > 0.0) || !(cfg.horizon_tau > 0.0))
    throw ConfigError("ode: dtau and horizon must be > 0");
  OdeSystem sys(cfg);
  Trajectory out;
  double m = cfg.m0, q = cfg.q0, tau = 0.0;
  const long long n_steps = std::llround(cfg.horizon_tau / cfg.dtau);
  const long long stride =
      std::max<long long>(1, std::llround(cfg.record_stride_tau / cfg.dtau));
  auto record = [&](double t) { out.states.push_back(sys.observables(m, q, t)); };
  record(0.0);
  for (long long step = 1; step <= n_steps; ++step) {
    double k1m, k1q, k2m, k2q, k3m, k3q, k4m, k4q;
    const double h = cfg.dtau;
    sys.rhs(m, q, k1m, k1q);
    sys.rhs(m + 0.5 * h * k1m, q + 0.5 * h * k1q, k2m, k2q);
    sys.rhs(m + 0.5 * h * k2m, q + 0.5 * h * k2q, k3m, k3q);
    sys.rhs(m + h * k3m, q + h * k3q, k4m, k4q);
    m += h / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
    q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    tau = step * h;
    if (!std::isfinite(m) || !std::isfinite(q) || q > 1e12) {
      out.diverged = true;
      out.diverged_tau = tau;
      break;
    }
    if (step % stride == 0 || step == n_steps) record(tau);
  }
  return out;
}

}  // namespace stelab
