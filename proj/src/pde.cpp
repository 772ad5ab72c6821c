#include "stelab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stelab/errors.hpp"
#include "stelab/special.hpp"

namespace stelab {

DensityGrid init_density(const PdeConfig& cfg) {
  if (cfg.cells < 8) throw ConfigError("pde: need at least 8 cells");
  Quantizer qw(cfg.quant_w);
  DensityGrid g;
  if (cfg.wmin == 0.0 && cfg.wmax == 0.0) {
    const double omega = qw.is_identity() ? 4.0 : qw.spec().range;
    g.lo = -omega - 4.0;
    g.hi = omega + 4.0;
  } else {
    g.lo = cfg.wmin;
    g.hi = cfg.wmax;
  }
  if (!(g.hi > g.lo)) throw ConfigError("pde: empty domain");
  g.h = (g.hi - g.lo) / cfg.cells;
  g.centers.resize(cfg.cells);
  for (int i = 0; i < cfg.cells; ++i) g.centers[i] = g.lo + (i + 0.5) * g.h;
  const TeacherMeasure mu = TeacherMeasure::from(cfg.teacher, cfg.gh_nodes);
  g.cond_values = mu.nodes;
  g.cond_weights = mu.weights;
  g.density.assign(mu.nodes.size(), std::vector<double>(cfg.cells, 0.0));
  // cell-averaged N(init_mean, init_sd^2), renormalized on the domain
  for (auto& rho : g.density) {
    double mass = 0.0;
    for (int i = 0; i < cfg.cells; ++i) {
      const double a = (g.lo + i * g.h - cfg.init_mean) / cfg.init_sd;
      const double b = (g.lo + (i + 1) * g.h - cfg.init_mean) / cfg.init_sd;
      rho[i] = (norm_cdf(b) - norm_cdf(a)) / g.h;
      mass += rho[i] * g.h;
    }
    for (auto& v : rho) v /= mass;
  }
  return g;
}

PdeCoefficients pde_coefficients(const DensityGrid& grid, const PdeConfig& cfg) {
  Quantizer qw(cfg.quant_w), qx(cfg.quant_x);
  double kx, sx2;
  qx.moments(kx, sx2);
  const double rho = cfg.teacher.rho;
  const int n = static_cast<int>(grid.centers.size());

  PdeCoefficients co;
  MacroState& st = co.obs;
  for (std::size_t j = 0; j < grid.cond_values.size(); ++j) {
    const double nu = grid.cond_values[j], wt = grid.cond_weights[j];
    double e1 = 0.0, e2 = 0.0, ep = 0.0, ep2 = 0.0, exp_ = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = grid.centers[i], p = qw.apply(w), r = grid.density[j][i] * grid.h;
      e1 += w * r;
      e2 += w * w * r;
      ep += p * r;
      ep2 += p * p * r;
      exp_ += w * p * r;
    }
    st.m += wt * nu * e1;
    st.q += wt * e2;
    st.m_psi += wt * nu * ep;
    st.q_psi += wt * ep2;
    st.r_psi += wt * exp_;
  }
  st.s = std::sqrt(std::max(0.0, st.q - st.m * st.m / rho));
  st.eps_g = generalization_error(kx, sx2, st.m_psi, st.q_psi, rho, cfg.noise_var);
  co.diffusion = 0.5 * cfg.eta * cfg.eta * sx2 * st.eps_g;

  co.face_drift.assign(grid.cond_values.size(), std::vector<double>(n + 1, 0.0));
  const double a = sx2 + cfg.lambda;
  for (std::size_t j = 0; j < grid.cond_values.size(); ++j)
    for (int i = 0; i <= n; ++i) {
      const double w = grid.lo + i * grid.h;
      co.face_drift[j][i] = cfg.eta * (kx * grid.cond_values[j] - a * qw.apply(w));
    }
  return co;
}

double pde_step(DensityGrid& grid, const PdeCoefficients& co, double dt) {
  const int n = static_cast<int>(grid.centers.size());
  const double h = grid.h, D = co.diffusion;
  double amax = 0.0;
  for (const auto& row : co.face_drift)
    for (double v : row) amax = std::max(amax, std::fabs(v));
  const double dt_diff = D > 0.0 ? h * h / (2.0 * D) : 1e300;
  const double dt_adv = amax > 0.0 ? h / amax : 1e300;
  const double limit = std::min(dt_diff, dt_adv);
  if (dt > limit)
    throw CflError("pde_step: dt violates the CFL limit", 0.45 * limit);

  double clamped = 0.0;
  std::vector<double> flux(n + 1, 0.0);
  for (std::size_t j = 0; j < grid.density.size(); ++j) {
    auto& rho = grid.density[j];
    const auto& af = co.face_drift[j];
    flux[0] = flux[n] = 0.0;  // no-flux boundaries
    for (int i = 1; i < n; ++i) {
      const double a = af[i];
      if (D > 0.0) {
        // Scharfetter-Gummel exponential fitting: avoids the O(a*h) numerical
        // diffusion of plain upwinding, which here would swamp the physical D.
        const double z = a * h / D;
        const double bp = std::fabs(z) < 1e-12 ? 1.0 - 0.5 * z : z / std::expm1(z);
        const double bm = bp + z;  // B(-z) = B(z) + z
        flux[i] = (D / h) * (bm * rho[i - 1] - bp * rho[i]);
      } else {
        flux[i] = a > 0.0 ? a * rho[i - 1] : a * rho[i];
      }
    }
    for (int i = 0; i < n; ++i) {
      rho[i] -= dt / h * (flux[i + 1] - flux[i]);
      if (rho[i] < 0.0) {
        clamped += -rho[i] * h;
        rho[i] = 0.0;
      }
    }
  }
  return clamped;
}

PdeResult solve_pde(const PdeConfig& cfg) {
  if (!(cfg.horizon_tau > 0.0)) throw ConfigError("pde: horizon must be > 0");
  PdeResult res;
  res.grid = init_density(cfg);
  std::vector<double> snaps = cfg.record_taus;
  std::sort(snaps.begin(), snaps.end());
  std::size_t snap_i = 0;
  double tau = 0.0, next_rec = 0.0;
  while (true) {
    PdeCoefficients co = pde_coefficients(res.grid, cfg);
    if (tau + 1e-12 >= next_rec) {
      co.obs.tau = tau;
      res.trajectory.states.push_back(co.obs);
      next_rec += cfg.record_stride_tau;
    }
    while (snap_i < snaps.size() && tau + 1e-12 >= snaps[snap_i]) {
      res.snapshots.emplace_back(tau, res.grid.density);
      ++snap_i;
    }
    if (!std::isfinite(co.obs.eps_g) || co.obs.q > 1e12) {
      res.trajectory.diverged = true;
      res.trajectory.diverged_tau = tau;
      break;
    }
    if (tau >= cfg.horizon_tau - 1e-12) break;

    double dt;
    if (cfg.dt > 0.0) {
      dt = cfg.dt;
    } else {
      double amax = 0.0;
      for (const auto& row : co.face_drift)
        for (double v : row) amax = std::max(amax, std::fabs(v));
      const double lim = std::min(
          co.diffusion > 0.0 ? res.grid.h * res.grid.h / (2.0 * co.diffusion) : 1e300,
          amax > 0.0 ? res.grid.h / amax : 1e300);
      dt = 0.45 * lim;
    }
    // land exactly on the next event (record, snapshot, horizon)
    double target = std::min(next_rec, cfg.horizon_tau);
    if (snap_i < snaps.size()) target = std::min(target, snaps[snap_i]);
    dt = std::min(dt, target - tau);
    if (dt <= 0.0) dt = 1e-12;
    res.clamped_mass += pde_step(res.grid, co, dt);
    tau += dt;
  }
  return res;
}

void write_pde_density_csv(const std::string& path, const PdeResult& result) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ConfigError("cannot open " + path);
  std::fprintf(f, "tau,w_star,cell_center,density\n");
  for (const auto& [tau, dens] : result.snapshots)
    for (std::size_t j = 0; j < result.grid.cond_values.size(); ++j)
      for (std::size_t i = 0; i < result.grid.centers.size(); ++i)
        std::fprintf(f, "%.10g,%.10g,%.10g,%.12g\n", tau, result.grid.cond_values[j],
                     result.grid.centers[i], dens[j][i]);
  std::fclose(f);
}

}  // namespace stelab
