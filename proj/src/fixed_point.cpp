#include "stelab/fixed_point.hpp"

#include <cmath>
#include <limits>

#include "stelab/errors.hpp"
#include "stelab/special.hpp"

namespace stelab {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Moments {
  double kx, sx2;
};

Moments input_moments(const FixedPointConfig& cfg) {
  Quantizer qx(cfg.quant_x);
  Moments m;
  qx.moments(m.kx, m.sx2);
  return m;
}

void eig2x2(const double j[4], double re[2], double im[2]) {
  const double tr = j[0] + j[3];
  const double det = j[0] * j[3] - j[1] * j[2];
  const double disc = tr * tr / 4.0 - det;
  if (disc >= 0.0) {
    const double r = std::sqrt(disc);
    re[0] = tr / 2.0 - r;
    re[1] = tr / 2.0 + r;
    im[0] = im[1] = 0.0;
  } else {
    re[0] = re[1] = tr / 2.0;
    im[0] = std::sqrt(-disc);
    im[1] = -im[0];
  }
}

Stability classify(const double re[2], double scale) {
  const double tol = 1e-9 * std::max(1.0, scale);
  const double worst = std::max(re[0], re[1]);
  if (worst > tol) return Stability::Unstable;
  if (worst > -tol) return Stability::Marginal;
  return Stability::Stable;
}

OdeConfig to_ode(const FixedPointConfig& cfg) {
  OdeConfig oc;
  oc.quant_w = cfg.quant_w;
  oc.quant_x = cfg.quant_x;
  oc.teacher = cfg.teacher;
  oc.eta = cfg.eta;
  oc.lambda = cfg.lambda;
  oc.noise_var = cfg.noise_var;
  oc.gh_nodes = cfg.gh_nodes;
  oc.s_floor = 1e-14;
  return oc;
}

}  // namespace

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Marginal: return "marginal";
    case Stability::Unstable: return "unstable";
    default: return "none";
  }
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Interior: return "interior";
    case Regime::Boundary: return "boundary";
    default: return "saturated";
  }
}

LevelPosition level_position(double c, const Quantizer& qw) {
  if (qw.is_identity()) throw ConfigError("level_position: needs a uniform quantizer");
  const auto& g = qw.grid();
  const double omega = qw.spec().range;
  LevelPosition lp;
  if (std::fabs(c) >= omega) {
    lp.regime = Regime::Saturated;
    lp.index = c > 0.0 ? g.L : 0;
    lp.frac = 0.0;
    return lp;
  }
  const double t = (c + omega) / g.delta;
  lp.index = static_cast<int>(std::floor(t));
  lp.frac = t - lp.index;
  if (lp.frac == 0.0) {
    lp.regime = Regime::Boundary;
  } else {
    lp.regime = Regime::Interior;
    lp.theta_star = g.thresholds[lp.index];  // theta_{i+1} in 1-based counting
  }
  return lp;
}

FixedPointReport input_only_fixed_point(const FixedPointConfig& cfg) {
  if (cfg.quant_w.kind != QuantKind::Identity)
    throw ConfigError("input_only_fixed_point: weight quantizer must be identity");
  if (!(cfg.eta > 0.0)) throw ConfigError("fixed point: eta must be > 0");
  const auto [kx, sx2] = input_moments(cfg);
  const double rho = cfg.teacher.rho, eta = cfg.eta, lam = cfg.lambda;
  const double a = sx2 + lam;
  FixedPointReport r;
  r.m_star = rho * kx / a;
  const double denom = 2.0 * a - eta * sx2 * sx2;
  r.q_star = (2.0 * kx * r.m_star * (1.0 - eta * sx2) +
              eta * sx2 * (rho + cfg.noise_var)) /
             denom;
  r.eps_g_star = generalization_error(kx, sx2, r.m_star, r.q_star, rho, cfg.noise_var);
  const double s2 = r.q_star - r.m_star * r.m_star / rho;
  r.s_star = s2 >= 0.0 ? std::sqrt(s2) : kNaN;
  r.jac[0] = -eta * a;
  r.jac[1] = 0.0;
  r.jac[2] = 2.0 * eta * kx - 2.0 * eta * eta * sx2 * kx;
  r.jac[3] = -2.0 * eta * a + eta * eta * sx2 * sx2;
  eig2x2(r.jac, r.eig_re, r.eig_im);
  r.eta_boundary = 2.0 * a / (sx2 * sx2);
  r.has_eta_boundary = true;
  r.stability = denom > 0.0 ? classify(r.eig_re, eta * a) : Stability::Unstable;
  if (denom <= 0.0) {
    // past the learning-rate boundary there is no physical fixed point
    r.q_star = r.s_star = r.eps_g_star = kNaN;
    r.stability = Stability::None;
  }
  r.regime = Regime::Interior;
  return r;
}

double solve_m_given_s(double s, double c, const Quantizer& qw, const TeacherMeasure& mu) {
  if (qw.is_identity()) return c;
  const double omega = qw.spec().range;
  const double rt = std::sqrt(mu.rho);
  if (std::fabs(c) >= omega * rt)
    throw ConfigError("solve_m_given_s: target overlap is saturated");
  auto mpsi = [&](double m) { return iso_moments(m, s, qw, mu).m_psi; };
  // m_psi is increasing in m and spans (-omega sqrt(rho), omega sqrt(rho))
  const auto& g = qw.grid();
  double lo = rt * (g.thresholds.front() - 1.0) - 60.0 * s * rt;
  double hi = rt * (g.thresholds.back() + 1.0) + 60.0 * s * rt;
  for (int i = 0; i < 64 && mpsi(lo) > c; ++i) lo = 2.0 * lo - hi;
  for (int i = 0; i < 64 && mpsi(hi) < c; ++i) hi = 2.0 * hi - lo;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mpsi(mid) < c)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-16 * (1.0 + std::fabs(lo))) break;
  }
  return 0.5 * (lo + hi);
}

namespace {

struct JointContext {
  Quantizer qw;
  TeacherMeasure mu;
  Moments mx;
  double c;  // rho kappa/(sigma^2+lambda)
  const FixedPointConfig& cfg;
};

double residual_impl(double s, const JointContext& ctx) {
  const double m = solve_m_given_s(s, ctx.c, ctx.qw, ctx.mu);
  const auto& g = ctx.qw.grid();
  const double rho = ctx.mu.rho;
  const int kmax = ctx.cfg.main_text_variant ? g.L - 1 : g.L;
  double S = 0.0;
  for (std::size_t n = 0; n < ctx.mu.nodes.size(); ++n) {
    const double mz = m * ctx.mu.nodes[n] / rho;
    for (int k = 0; k < kmax; ++k)
      S += ctx.mu.weights[n] * norm_pdf((mz - g.thresholds[k]) / s);
  }
  const double chi = ctx.mx.sx2 / (ctx.mx.sx2 + ctx.cfg.lambda);
  const double pref =
      ctx.cfg.main_text_variant ? 2.0 * s / chi : 2.0 * g.delta * s / chi;
  const IsoMoments im = iso_moments(m, s, ctx.qw, ctx.mu);
  const double eps = generalization_error(ctx.mx.kx, ctx.mx.sx2, im.m_psi, im.q_psi, rho,
                                          ctx.cfg.noise_var);
  return pref * S - ctx.cfg.eta * eps;
}

}  // namespace

double fixed_point_residual(double s, const FixedPointConfig& cfg) {
  JointContext ctx{Quantizer(cfg.quant_w), TeacherMeasure::from(cfg.teacher, cfg.gh_nodes),
                   input_moments(cfg), 0.0, cfg};
  ctx.c = ctx.mu.rho * ctx.mx.kx / (ctx.mx.sx2 + cfg.lambda);
  return residual_impl(s, ctx);
}

FixedPointReport joint_fixed_point(const FixedPointConfig& cfg) {
  if (cfg.quant_w.kind == QuantKind::Identity) return input_only_fixed_point(cfg);
  if (!(cfg.eta > 0.0)) throw ConfigError("fixed point: eta must be > 0");
  JointContext ctx{Quantizer(cfg.quant_w), TeacherMeasure::from(cfg.teacher, cfg.gh_nodes),
                   input_moments(cfg), 0.0, cfg};
  const double rho = ctx.mu.rho;
  ctx.c = rho * ctx.mx.kx / (ctx.mx.sx2 + cfg.lambda);
  FixedPointReport r;
  r.eta_boundary = 2.0 * (ctx.mx.sx2 + cfg.lambda) / (ctx.mx.sx2 * ctx.mx.sx2);
  r.has_eta_boundary = false;  // input-only reference value, not exact here

  const double omega = ctx.qw.spec().range;
  const LevelPosition lp = level_position(ctx.c / std::sqrt(rho), ctx.qw);
  r.regime = lp.regime;
  if (lp.regime == Regime::Saturated) {
    // |m| grows without bound; only the limiting error is finite:
    // m_psi -> omega E|nu|, q_psi -> omega^2
    double eabs = 0.0;
    for (std::size_t n = 0; n < ctx.mu.nodes.size(); ++n)
      eabs += ctx.mu.weights[n] * std::fabs(ctx.mu.nodes[n]);
    r.m_star = r.q_star = r.s_star = kNaN;
    r.eps_g_star = generalization_error(ctx.mx.kx, ctx.mx.sx2, omega * eabs,
                                        omega * omega, rho, cfg.noise_var);
    r.stability = Stability::None;
    return r;
  }

  // G(0+) < 0 (diffusion starves) and G grows ~ s for large s: bracket the
  // root on a log grid, then bisect
  double slo = 0.0, shi = 0.0, flo = 0.0;
  double prev_s = 1e-9, prev_f = residual_impl(prev_s, ctx);
  for (double s = 2e-9; s < 1e4; s *= 1.35) {
    const double f = residual_impl(s, ctx);
    if ((prev_f < 0.0) != (f < 0.0)) {
      slo = prev_s;
      shi = s;
      flo = prev_f;
      break;
    }
    prev_s = s;
    prev_f = f;
  }
  if (shi == 0.0)
    throw DivergenceError("joint_fixed_point: no self-consistent width found", 0.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (slo + shi);
    const double f = residual_impl(mid, ctx);
    if ((f < 0.0) == (flo < 0.0)) {
      slo = mid;
      flo = f;
    } else {
      shi = mid;
    }
    if (shi - slo < 1e-15 * (1.0 + slo)) break;
  }
  r.s_star = 0.5 * (slo + shi);
  r.residual = std::fabs(residual_impl(r.s_star, ctx));
  r.m_star = solve_m_given_s(r.s_star, ctx.c, ctx.qw, ctx.mu);
  r.q_star = r.s_star * r.s_star + r.m_star * r.m_star / rho;
  const IsoMoments im = iso_moments(r.m_star, r.s_star, ctx.qw, ctx.mu);
  r.eps_g_star = generalization_error(ctx.mx.kx, ctx.mx.sx2, im.m_psi, im.q_psi, rho,
                                      cfg.noise_var);

  // numerical Jacobian of the macroscopic flow at (m*, q*)
  // Linearize in (m, s) rather than (m, q): near the fixed point q - m^2/rho
  // = s*^2 is tiny, and the (m, q) Jacobian suffers catastrophic cancellation
  // in its determinant. Eigenvalues at a fixed point are invariant under the
  // (m, q) <-> (m, s) change of coordinates.
  OdeSystem sys(to_ode(cfg));
  auto flow_ms = [&](double m, double s, double& fm, double& fs) {
    double dm, dq;
    sys.rhs(m, s * s + m * m / rho, dm, dq);
    fm = dm;
    fs = (dq - 2.0 * m / rho * dm) / (2.0 * s);
  };
  const double hm = 1e-4 * std::max(r.s_star, 1e-3 * std::fabs(r.m_star));
  const double hs = 1e-4 * r.s_star;
  double fmp, fsp, fmm, fsm;
  flow_ms(r.m_star + hm, r.s_star, fmp, fsp);
  flow_ms(r.m_star - hm, r.s_star, fmm, fsm);
  r.jac[0] = (fmp - fmm) / (2.0 * hm);
  r.jac[2] = (fsp - fsm) / (2.0 * hm);
  flow_ms(r.m_star, r.s_star + hs, fmp, fsp);
  flow_ms(r.m_star, r.s_star - hs, fmm, fsm);
  r.jac[1] = (fmp - fmm) / (2.0 * hs);
  r.jac[3] = (fsp - fsm) / (2.0 * hs);
  eig2x2(r.jac, r.eig_re, r.eig_im);
  r.stability = classify(r.eig_re, cfg.eta * (ctx.mx.sx2 + cfg.lambda));
  return r;
}

SmallEtaExpansion small_eta_asymptotics(const FixedPointConfig& cfg) {
  if (cfg.quant_w.kind == QuantKind::Identity) {
    // eta -> 0 limit of the input-only closed form
    const auto [kx, sx2] = input_moments(cfg);
    const double rho = cfg.teacher.rho, a = sx2 + cfg.lambda;
    SmallEtaExpansion e;
    e.c = rho * kx / a;
    e.p = 0.0;
    e.regime = Regime::Interior;
    e.eps0 = rho + cfg.noise_var - 2.0 * kx * e.c + sx2 * e.c * e.c / rho;
    e.correction = 0.0;
    return e;
  }
  const Quantizer qw(cfg.quant_w);
  const auto [kx, sx2] = input_moments(cfg);
  const double rho = cfg.teacher.rho;
  SmallEtaExpansion e;
  e.c = rho * kx / (sx2 + cfg.lambda);
  const LevelPosition lp = level_position(e.c / std::sqrt(rho), qw);
  e.regime = lp.regime;
  e.p = lp.frac;
  const double omega = qw.spec().range, delta = qw.grid().delta;
  if (lp.regime == Regime::Saturated) {
    e.eps0 = rho + cfg.noise_var - 2.0 * kx * omega * std::sqrt(rho) +
             sx2 * omega * omega;
    e.correction = 0.0;
    return e;
  }
  e.eps0 = rho + cfg.noise_var - 2.0 * kx * e.c + sx2 * e.c * e.c / rho;
  e.correction = sx2 * delta * delta * e.p * (1.0 - e.p);
  return e;
}

}  // namespace stelab
