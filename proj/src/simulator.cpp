#include "stelab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>

#include "stelab/errors.hpp"
#include "stelab/rng.hpp"
#include "stelab/step_kernel.hpp"

namespace stelab {

void ste_step(std::vector<double>& w, const std::vector<double>& x, double y,
              const Quantizer& quant_w, const Quantizer& quant_x, double eta,
              double lambda) {
  if (w.size() != x.size()) throw ConfigError("ste_step: dimension mismatch");
  const std::size_t d = w.size();
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  double yhat = 0.0;
  for (std::size_t i = 0; i < d; ++i) yhat += quant_w.apply(w[i]) * quant_x.apply(x[i]);
  yhat *= inv_sqrt_d;
  const double coef = -eta * (yhat - y) * inv_sqrt_d;
  const double ridge = eta * lambda / static_cast<double>(d);
  for (std::size_t i = 0; i < d; ++i)
    w[i] += coef * quant_x.apply(x[i]) - ridge * quant_w.apply(w[i]);
}

MacroState macro_observables(const double* w, const double* w_star, std::size_t n,
                             const Quantizer& quant_w, double kappa_x, double sigma_sq_x,
                             double rho, double noise_var, double tau) {
  const double d = static_cast<double>(n);
  double m = 0.0, q = 0.0, mp = 0.0, qp = 0.0, rp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pw = quant_w.apply(w[i]);
    m += w_star[i] * w[i];
    q += w[i] * w[i];
    mp += w_star[i] * pw;
    qp += pw * pw;
    rp += pw * w[i];
  }
  MacroState st;
  st.tau = tau;
  st.m = m / d;
  st.q = q / d;
  st.m_psi = mp / d;
  st.q_psi = qp / d;
  st.r_psi = rp / d;
  st.s = std::sqrt(std::max(0.0, st.q - st.m * st.m / rho));
  st.eps_g = generalization_error(kappa_x, sigma_sq_x, st.m_psi, st.q_psi, rho, noise_var);
  return st;
}

MacroState macro_observables(const std::vector<double>& w, const std::vector<double>& w_star,
                             const Quantizer& quant_w, double kappa_x, double sigma_sq_x,
                             double rho, double noise_var, double tau) {
  if (w.size() != w_star.size()) throw ConfigError("macro_observables: dimension mismatch");
  return macro_observables(w.data(), w_star.data(), w.size(), quant_w, kappa_x, sigma_sq_x,
                           rho, noise_var, tau);
}

namespace {

HardQuant make_hard_quant(const Quantizer& q) {
  HardQuant h;
  h.identity = q.is_identity();
  if (!h.identity) {
    h.omega = q.spec().range;
    h.delta = q.grid().delta;
    h.inv_delta = 1.0 / h.delta;
    h.Lf = static_cast<double>(q.grid().L);
  }
  return h;
}

bool state_bad(const double* w, std::size_t d) {
  for (std::size_t i = 0; i < d; ++i)
    if (!std::isfinite(w[i]) || std::fabs(w[i]) > 1e8) return true;
  return false;
}

std::vector<HistogramSnapshot> make_histograms(const double* w, const double* wstar,
                                               std::size_t d, double tau, int bins) {
  // condition on the (few) distinct teacher values; fall back to a single
  // unconditioned histogram (w_star = NaN) for continuous teachers
  std::map<double, std::vector<const double*>> groups;
  for (std::size_t i = 0; i < d; ++i) groups[wstar[i]].push_back(&w[i]);
  const bool merged = groups.size() > 16;
  std::vector<HistogramSnapshot> out;
  auto build = [&](double wsv, const std::vector<const double*>& ptrs) {
    HistogramSnapshot h;
    h.tau = tau;
    h.w_star = wsv;
    double lo = 1e300, hi = -1e300;
    for (auto p : ptrs) {
      lo = std::min(lo, *p);
      hi = std::max(hi, *p);
    }
    if (hi <= lo) hi = lo + 1e-12;
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    const double width = (hi - lo) / bins;
    h.edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) h.edges[b] = lo + b * width;
    h.density.assign(bins, 0.0);
    for (auto p : ptrs) {
      int b = static_cast<int>((*p - lo) / width);
      b = std::clamp(b, 0, bins - 1);
      h.density[b] += 1.0;
    }
    const double norm = 1.0 / (ptrs.size() * width);
    for (auto& v : h.density) v *= norm;
    out.push_back(std::move(h));
  };
  if (merged) {
    std::vector<const double*> all;
    for (auto& [k, v] : groups) all.insert(all.end(), v.begin(), v.end());
    build(std::numeric_limits<double>::quiet_NaN(), all);
  } else {
    for (auto& [k, v] : groups) build(k, v);
  }
  return out;
}

}  // namespace

Trajectory run_simulation(const SimConfig& cfg) {
  if (cfg.d == 0) throw ConfigError("simulate: d must be > 0");
  if (!(cfg.eta >= 0.0) || !(cfg.lambda >= 0.0) || !(cfg.noise_var >= 0.0))
    throw ConfigError("simulate: eta, lambda, noise_var must be >= 0");
  if (!(cfg.horizon_tau > 0.0) || !(cfg.record_stride_tau > 0.0))
    throw ConfigError("simulate: horizon and stride must be > 0");
  if (cfg.runs < 1) throw ConfigError("simulate: runs must be >= 1");
  const Quantizer qw(cfg.quant_w), qx(cfg.quant_x);
  if (!qw.is_hard() || !qx.is_hard())
    throw ConfigError("simulate: simulator uses hard quantizers (temperature 0)");
  double kx, sx2;
  qx.moments(kx, sx2);

  const std::size_t d = cfg.d;
  const double dd = static_cast<double>(d);
  const long long n_steps = std::llround(cfg.horizon_tau * dd);
  const long long stride = std::max<long long>(1, std::llround(cfg.record_stride_tau * dd));
  std::vector<long long> rec_steps;
  for (long long s = 0; s <= n_steps; s += stride) rec_steps.push_back(s);
  if (rec_steps.back() != n_steps) rec_steps.push_back(n_steps);
  std::vector<long long> hist_steps;
  for (double t : cfg.hist_taus)
    hist_steps.push_back(std::clamp<long long>(std::llround(t * dd), 0, n_steps));

  const std::vector<double> wstar_v =
      sample_teacher(d, cfg.teacher, derive_seed(cfg.seed, "teacher", 0));

  const std::size_t nrec = rec_steps.size();
  std::vector<std::array<double, 8>> sum(nrec, std::array<double, 8>{}),
      sumsq(nrec, std::array<double, 8>{});
  std::vector<int> count(nrec, 0);
  std::vector<HistogramSnapshot> hist_acc;
  Trajectory out;
  const int runs = cfg.replay_path.empty() ? cfg.runs : 1;

  // one page-staggered arena for the per-step arrays: same-index loads and
  // stores in the inner loop must not share a 4 KiB page offset, otherwise
  // false store-to-load dependencies serialize the kernel
  const std::size_t page = 4096 / sizeof(double);
  const std::size_t astride = ((d + page - 1) / page) * page + 96;
  std::vector<double> arena(6 * astride, 0.0);
  double* const w = arena.data();
  double* const psw = arena.data() + astride;
  double* const x = arena.data() + 2 * astride;
  double* const px = arena.data() + 3 * astride;
  double* const wstar = arena.data() + 4 * astride;
  double* const zeros = arena.data() + 5 * astride;
  std::copy(wstar_v.begin(), wstar_v.end(), wstar);
  const double inv_sqrt_d = 1.0 / std::sqrt(dd);
  const HardQuant hqw = make_hard_quant(qw), hqx = make_hard_quant(qx);
  const double noise_sd = std::sqrt(cfg.noise_var);

  std::unique_ptr<RecordReader> reader;
  if (!cfg.replay_path.empty()) {
    reader = std::make_unique<RecordReader>(cfg.replay_path);
    if (reader->dim() != d) throw ConfigError("replay: recorded dimension mismatch");
  }

  for (int r = 0; r < runs && !out.diverged; ++r) {
    NormalSource data(derive_seed(cfg.seed, "data", r));
    NormalSource init(derive_seed(cfg.seed, "init", r));
    Rng noise(derive_seed(cfg.seed, "noise", r));
    if (cfg.init == WeightInit::Zero) {
      std::fill(w, w + d, 0.0);
    } else {
      init.fill(w, d);
      for (std::size_t i = 0; i < d; ++i) w[i] *= cfg.init_scale;
    }
    for (std::size_t i = 0; i < d; ++i) psw[i] = qw.apply(w[i]);

    std::unique_ptr<RecordWriter> writer;
    if (r == 0 && !cfg.record_path.empty())
      writer = std::make_unique<RecordWriter>(cfg.record_path, d, cfg.seed);

    std::size_t rec_i = 0, hist_i = 0;
    const double ridge = cfg.eta * cfg.lambda / dd;
    std::vector<long long> hsorted = hist_steps;
    std::sort(hsorted.begin(), hsorted.end());
    for (long long step = 0; step <= n_steps; ++step) {
      if (rec_i < nrec && rec_steps[rec_i] == step) {
        if (state_bad(w, d)) {
          out.diverged = true;
          out.diverged_tau = step / dd;
          break;
        }
        const MacroState st = macro_observables(w, wstar, d, qw, kx, sx2, cfg.teacher.rho,
                                                cfg.noise_var, step / dd);
        const double vals[8] = {st.m,     st.q,     st.s,     st.m_psi,
                                st.q_psi, st.r_psi, st.eps_g, 0.0};
        for (int j = 0; j < 8; ++j) {
          sum[rec_i][j] += vals[j];
          sumsq[rec_i][j] += vals[j] * vals[j];
        }
        ++count[rec_i];
        ++rec_i;
      }
      while (hist_i < hsorted.size() && hsorted[hist_i] == step) {
        auto hs = make_histograms(w, wstar, d, step / dd, cfg.hist_bins);
        hist_acc.insert(hist_acc.end(), hs.begin(), hs.end());
        ++hist_i;
      }
      if (step == n_steps) break;

      double y = 0.0;
      if (reader) {
        if (!reader->next(x, y)) break;  // y from file includes the mean part
      } else {
        data.fill(x, d);
        y = noise_sd != 0.0 ? noise_sd * noise.next_normal() : 0.0;
        if (writer) {
          double mean = 0.0;
          for (std::size_t i = 0; i < d; ++i) mean += wstar[i] * x[i];
          const double yfull = mean * inv_sqrt_d + y;
          writer->append(x, yfull);
        }
      }
      // on replay y already carries the teacher part, so the kernel sees a
      // zero teacher and adds nothing
      const double* ws = reader ? zeros : wstar;
      step_kernel_dispatch(w, psw, x, px, ws, d, hqw,
                           hqx, y, inv_sqrt_d, cfg.eta, ridge);
    }
  }

  for (std::size_t i = 0; i < nrec; ++i) {
    if (count[i] == 0) break;
    const double n = count[i];
    MacroState mean, se;
    auto get = [&](int j) { return sum[i][j] / n; };
    auto sev = [&](int j) {
      if (count[i] < 2) return 0.0;
      const double var = std::max(0.0, (sumsq[i][j] - sum[i][j] * sum[i][j] / n) / (n - 1.0));
      return std::sqrt(var / n);
    };
    mean.tau = se.tau = rec_steps[i] / dd;
    mean.m = get(0); mean.q = get(1); mean.s = get(2); mean.m_psi = get(3);
    mean.q_psi = get(4); mean.r_psi = get(5); mean.eps_g = get(6);
    se.m = sev(0); se.q = sev(1); se.s = sev(2); se.m_psi = sev(3);
    se.q_psi = sev(4); se.r_psi = sev(5); se.eps_g = sev(6);
    mean.eps_g_stderr = se.eps_g;
    out.states.push_back(mean);
    out.stderrs.push_back(se);
  }

  // average histogram densities taken at the same (tau, w_star) across runs
  std::map<std::pair<double, double>, HistogramSnapshot> merged;
  std::map<std::pair<double, double>, int> nmerged;
  for (auto& h : hist_acc) {
    auto key = std::make_pair(h.tau, h.w_star);
    auto it = merged.find(key);
    if (it == merged.end()) {
      merged[key] = h;
      nmerged[key] = 1;
    } else if (it->second.density.size() == h.density.size()) {
      // bins differ per run; merge by rebinning onto the first run's grid
      HistogramSnapshot& acc = it->second;
      const double lo = acc.edges.front(), hi = acc.edges.back();
      const int bins = static_cast<int>(acc.density.size());
      const double width = (hi - lo) / bins;
      for (int b = 0; b < bins; ++b) {
        const double c = lo + (b + 0.5) * width;
        double v = 0.0;
        if (c >= h.edges.front() && c < h.edges.back()) {
          int hb = static_cast<int>((c - h.edges.front()) /
                                    (h.edges[1] - h.edges[0]));
          hb = std::clamp<int>(hb, 0, static_cast<int>(h.density.size()) - 1);
          v = h.density[hb];
        }
        acc.density[b] += v;
      }
      ++nmerged[key];
    }
  }
  for (auto& [key, h] : merged) {
    const double inv = 1.0 / nmerged[key];
    for (auto& v : h.density) v *= inv;
    out.histograms.push_back(std::move(h));
  }
  return out;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ConfigError("cannot open " + path);
  std::fprintf(f, "tau,m,q,s,m_psi,q_psi,r_psi,eps_g,eps_g_stderr\n");
  for (const auto& s : traj.states)
    std::fprintf(f, "%.10g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.6g\n", s.tau, s.m,
                 s.q, s.s, s.m_psi, s.q_psi, s.r_psi, s.eps_g, s.eps_g_stderr);
  std::fclose(f);
}

void write_histograms_csv(const std::string& path, const Trajectory& traj) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ConfigError("cannot open " + path);
  std::fprintf(f, "tau,w_star,bin_left,bin_right,density\n");
  for (const auto& h : traj.histograms)
    for (std::size_t b = 0; b < h.density.size(); ++b)
      std::fprintf(f, "%.10g,%.10g,%.10g,%.10g,%.12g\n", h.tau, h.w_star, h.edges[b],
                   h.edges[b + 1], h.density[b]);
  std::fclose(f);
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "r");
  if (!f) throw ConfigError("cannot open " + path);
  char line[512];
  if (!std::fgets(line, sizeof line, f)) {
    std::fclose(f);
    throw ConfigError("empty trajectory csv: " + path);
  }
  if (std::string(line).rfind("tau,m,q,s,m_psi,q_psi,r_psi,eps_g", 0) != 0) {
    std::fclose(f);
    throw ConfigError("unexpected trajectory csv header in " + path);
  }
  Trajectory t;
  while (std::fgets(line, sizeof line, f)) {
    MacroState s;
    const int n = std::sscanf(line, "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &s.tau, &s.m,
                              &s.q, &s.s, &s.m_psi, &s.q_psi, &s.r_psi, &s.eps_g,
                              &s.eps_g_stderr);
    if (n < 8) {
      std::fclose(f);
      throw ConfigError("malformed trajectory row in " + path);
    }
    t.states.push_back(s);
  }
  std::fclose(f);
  return t;
}

}  // namespace stelab
