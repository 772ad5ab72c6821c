#include "stelab/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "stelab/errors.hpp"
#include "stelab/fixed_point.hpp"
#include "stelab/ode.hpp"
#include "stelab/pde.hpp"
#include "stelab/simulator.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace stelab {

namespace {

QuantizerSpec quant_from(const Config& c, const std::string& prefix,
                         const QuantizerSpec& dflt) {
  if (c.get_bool(prefix + ".identity", dflt.kind == QuantKind::Identity))
    return QuantizerSpec::identity();
  QuantizerSpec q = QuantizerSpec::uniform(
      static_cast<int>(c.get_int(prefix + ".bits", dflt.bits ? dflt.bits : 2)),
      c.get_real(prefix + ".range", dflt.range ? dflt.range : 1.0),
      c.get_real(prefix + ".temperature", dflt.temperature));
  return q;
}

TeacherSpec teacher_from(const Config& c) {
  TeacherSpec t;
  const std::string d = c.get("teacher.dist", "ones");
  if (d == "ones")
    t.dist = TeacherDist::Ones;
  else if (d == "rademacher")
    t.dist = TeacherDist::Rademacher;
  else if (d == "gaussian")
    t.dist = TeacherDist::Gaussian;
  else
    throw ConfigError("teacher.dist must be ones|rademacher|gaussian");
  t.rho = c.get_real("teacher.rho", 1.0);
  return t;
}

SimConfig sim_from(const Config& c) {
  SimConfig s;
  s.d = static_cast<std::size_t>(c.get_int("d", 100));
  s.quant_w = quant_from(c, "weights", QuantizerSpec::uniform(2, 1.0));
  s.quant_x = quant_from(c, "inputs", QuantizerSpec::identity());
  s.teacher = teacher_from(c);
  s.eta = c.get_real("eta", 0.05);
  s.lambda = c.get_real("lambda", 0.0);
  s.noise_var = c.get_real("noise.var", 0.0);
  s.horizon_tau = c.get_real("horizon", 100.0);
  s.record_stride_tau = c.get_real("record.stride", 0.1);
  s.runs = static_cast<int>(c.get_int("runs", 1));
  s.seed = static_cast<uint64_t>(c.get_int("seed", 1));
  const std::string init = c.get("init", "gauss");
  if (init == "gauss")
    s.init = WeightInit::GaussianStd;
  else if (init == "zero")
    s.init = WeightInit::Zero;
  else
    throw ConfigError("init must be gauss|zero");
  s.init_scale = c.get_real("init.scale", 1.0);
  s.hist_taus = c.get_reals("hist.taus");
  s.hist_bins = static_cast<int>(c.get_int("hist.bins", 80));
  s.record_path = c.get("record.path", "");
  s.replay_path = c.get("replay.path", "");
  return s;
}

OdeConfig ode_from(const Config& c) {
  OdeConfig o;
  o.quant_w = quant_from(c, "weights", QuantizerSpec::uniform(2, 1.0));
  o.quant_x = quant_from(c, "inputs", QuantizerSpec::identity());
  o.teacher = teacher_from(c);
  o.eta = c.get_real("eta", 0.05);
  o.lambda = c.get_real("lambda", 0.0);
  o.noise_var = c.get_real("noise.var", 0.0);
  o.m0 = c.get_real("ode.m0", 0.0);
  o.q0 = c.get_real("ode.q0", c.get_real("init.scale", 1.0) *
                                  c.get_real("init.scale", 1.0));
  o.horizon_tau = c.get_real("horizon", 100.0);
  o.dtau = c.get_real("ode.dtau", 0.01);
  o.record_stride_tau = c.get_real("record.stride", 0.1);
  o.s_floor = c.get_real("ode.s.floor", 1e-10);
  o.gh_nodes = static_cast<int>(c.get_int("ode.gh.nodes", 80));
  return o;
}

PdeConfig pde_from(const Config& c) {
  PdeConfig p;
  p.quant_w = quant_from(c, "weights", QuantizerSpec::uniform(2, 1.0));
  p.quant_x = quant_from(c, "inputs", QuantizerSpec::identity());
  p.teacher = teacher_from(c);
  p.eta = c.get_real("eta", 0.05);
  p.lambda = c.get_real("lambda", 0.0);
  p.noise_var = c.get_real("noise.var", 0.0);
  p.wmin = c.get_real("pde.wmin", 0.0);
  p.wmax = c.get_real("pde.wmax", 0.0);
  p.cells = static_cast<int>(c.get_int("pde.cells", 400));
  p.dt = c.get_real("pde.dt", 0.0);
  p.horizon_tau = c.get_real("horizon", 100.0);
  p.record_stride_tau = c.get_real("record.stride", 0.1);
  p.record_taus = c.get_reals("pde.record.taus");
  p.init_mean = c.get_real("pde.init.mean", 0.0);
  p.init_sd = c.get_real("pde.init.sd", c.get_real("init.scale", 1.0));
  return p;
}

FixedPointConfig fp_from(const Config& c) {
  FixedPointConfig f;
  f.quant_w = quant_from(c, "weights", QuantizerSpec::identity());
  f.quant_x = quant_from(c, "inputs", QuantizerSpec::identity());
  f.teacher = teacher_from(c);
  f.eta = c.get_real("eta", 0.01);
  f.lambda = c.get_real("lambda", 0.0);
  f.noise_var = c.get_real("noise.var", 0.0);
  const std::string variant = c.get("fixedpoint.variant", "appendix");
  if (variant == "appendix")
    f.main_text_variant = false;
  else if (variant == "main_text")
    f.main_text_variant = true;
  else
    throw ConfigError("fixedpoint.variant must be appendix|main_text");
  return f;
}

void run_pool(std::vector<std::function<void()>>& jobs, int threads) {
  if (threads <= 1 || jobs.size() <= 1) {
    for (auto& j : jobs) j();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        jobs[i]();
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(threads, static_cast<int>(jobs.size()));
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

json report_json(const FixedPointReport& r) {
  json j;
  j["m_star"] = r.m_star;
  j["q_star"] = r.q_star;
  j["s_star"] = r.s_star;
  j["eps_g_star"] = r.eps_g_star;
  j["jacobian"] = {r.jac[0], r.jac[1], r.jac[2], r.jac[3]};
  j["eig_re"] = {r.eig_re[0], r.eig_re[1]};
  j["eig_im"] = {r.eig_im[0], r.eig_im[1]};
  j["stability"] = to_string(r.stability);
  j["regime"] = to_string(r.regime);
  j["eta_boundary"] = r.eta_boundary;
  j["eta_boundary_exact"] = r.has_eta_boundary;
  j["residual"] = r.residual;
  return j;
}

struct Artifacts {
  fs::path dir;
  std::vector<std::string> files;
  std::mutex mu;
  fs::path declare(const std::string& name) {
    std::lock_guard<std::mutex> lock(mu);
    files.push_back(name);
    return dir / name;
  }
};

void plot_trajectory(Artifacts& art, const std::string& name, const Trajectory& t) {
  PlotSeries s;
  s.label = "eps_g";
  for (const auto& st : t.states) {
    s.x.push_back(st.tau);
    s.y.push_back(st.eps_g);
  }
  write_svg_plot(art.declare(name).string(), "generalization error", "tau", "eps_g", {s});
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "appF"};
}

Config preset_config(const std::string& name) {
  // presets encode the paper captions; every key can be overridden
  std::string text;
  if (name == "fig1") {
    text =
        "kind = reproduce\npreset = fig1\n"
        "d = 3000\nweights.bits = 2\nweights.range = 2\n"
        "inputs.identity = false\ninputs.bits = 2\ninputs.range = 2\n"
        "eta = 0.05\nlambda = 0\nnoise.var = 0\n"
        "horizon = 100\nrecord.stride = 0.5\nruns = 1\n"
        "hist.taus = 10,25,50,100\nhist.bins = 48\n"
        "pde.cells = 4800\npde.record.taus = 10,25,50,100\n";
  } else if (name == "fig2") {
    text =
        "kind = reproduce\npreset = fig2\n"
        "d = 900\nweights.range = 1\ninputs.identity = true\n"
        "eta = 0.04\nlambda = 1\nnoise.var = 0\n"
        "horizon = 300\nrecord.stride = 0.5\nruns = 5\n"
        "sweep.bits_w = 2,3,4,5\n";
  } else if (name == "fig3") {
    text =
        "kind = reproduce\npreset = fig3\n"
        "d = 900\nweights.bits = 3\ninputs.identity = true\n"
        "eta = 0.04\nlambda = 1\nnoise.var = 0\n"
        "horizon = 300\nrecord.stride = 0.5\nruns = 5\n"
        "sweep.omega_w = 0.25,0.5,1.0,1.25,1.5\n";
  } else if (name == "fig4") {
    text =
        "kind = reproduce\npreset = fig4\n"
        "d = 500\nweights.range = 1\n"
        "inputs.identity = false\ninputs.range = 1\n"
        "eta = 0.05\nlambda = 1\nnoise.var = 0\n"
        "horizon = 300\nrecord.stride = 0.5\nruns = 5\n"
        "sweep.bits_w = 3,4\nsweep.bits_x = 3,4,5\n";
  } else if (name == "fig5") {
    text =
        "kind = reproduce\npreset = fig5\n"
        "weights.identity = true\ninputs.identity = false\n"
        "lambda = 0\nnoise.var = 0\neta = 0.01\n"
        "sweep.bits_x = 2,3,4,10\n"
        "sweep.omega_x.min = 0.1\nsweep.omega_x.max = 4\nsweep.omega_x.step = 0.05\n";
  } else if (name == "fig6") {
    text =
        "kind = reproduce\npreset = fig6\n"
        "inputs.identity = false\ninputs.range = 1\n"
        "lambda = 0\nnoise.var = 0\neta = 1e-4\n"
        "sweep.bits_w = 2,3\nsweep.bits_x = 2,3,4\n"
        "sweep.omega_w.min = 0.2\nsweep.omega_w.max = 3\nsweep.omega_w.step = 0.05\n"
        "with.sim = false\n"  // set true to add d=100 simulator points (slow)
        "sim.omega_w = 0.6,1.2,2.4\nd = 100\nhorizon = 8e6\n";
  } else if (name == "appF") {
    text =
        "kind = reproduce\npreset = appF\n"
        "inputs.identity = true\neta = 0.04\nnoise.var = 0\n"
        "horizon = 300\nrecord.stride = 0.5\n"
        "sweep.lambda = 0.5,1.0,1.5\n"
        "sweep.bits_w = 2,3,4,5\n"
        "sweep.omega_w = 0.25,0.5,1.0,1.25,1.5\n";
  } else {
    throw ConfigError("unknown preset: " + name +
                      " (expected fig1|fig2|fig3|fig4|fig5|fig6|appF)");
  }
  return Config::parse_text(text);
}

CompareResult compare_trajectories(const std::string& csv_a, const std::string& csv_b,
                                   double tolerance, bool interpolate) {
  const Trajectory a = read_trajectory_csv(csv_a);
  const Trajectory b = read_trajectory_csv(csv_b);
  if (a.states.empty() || b.states.empty())
    throw ConfigError("compare: empty trajectory");
  CompareResult res;
  auto eval_b = [&](double tau, bool& ok) -> double {
    // linear interpolation onto a's grid
    ok = tau >= b.states.front().tau - 1e-9 && tau <= b.states.back().tau + 1e-9;
    if (!ok) return 0.0;
    std::size_t hi = 0;
    while (hi < b.states.size() && b.states[hi].tau < tau) ++hi;
    if (hi == 0) return b.states.front().eps_g;
    if (hi >= b.states.size()) return b.states.back().eps_g;
    const auto &s0 = b.states[hi - 1], &s1 = b.states[hi];
    const double f = (tau - s0.tau) / std::max(1e-300, s1.tau - s0.tau);
    return s0.eps_g + f * (s1.eps_g - s0.eps_g);
  };
  if (!interpolate) {
    if (a.states.size() != b.states.size())
      throw ConfigError("compare: tau grids differ (pass interpolate to allow)");
    for (std::size_t i = 0; i < a.states.size(); ++i)
      if (std::fabs(a.states[i].tau - b.states[i].tau) > 1e-9)
        throw ConfigError("compare: tau grids differ (pass interpolate to allow)");
  }
  for (const auto& st : a.states) {
    bool ok = true;
    const double other = interpolate ? eval_b(st.tau, ok)
                                     : b.states[&st - a.states.data()].eps_g;
    if (!ok) continue;
    const double diff = std::fabs(st.eps_g - other);
    res.sup_diff = std::max(res.sup_diff, diff);
    if (diff > tolerance && res.first_divergence_tau < 0.0)
      res.first_divergence_tau = st.tau;
  }
  res.within = res.sup_diff <= tolerance;
  return res;
}

std::string file_checksum(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("checksum: cannot open " + path);
  uint64_t h = 0xcbf29ce484222325ULL;
  char buf[65536];
  while (f.read(buf, sizeof buf) || f.gcount() > 0) {
    for (std::streamsize i = 0; i < f.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!f) break;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series, bool log_y) {
  const int W = 760, H = 480, ML = 70, MR = 20, MT = 40, MB = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double y = s.y[i];
      if (log_y) {
        if (!(y > 0.0)) continue;
        y = std::log10(y);
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
  auto py = [&](double y) {
    if (log_y) y = std::log10(std::max(y, 1e-300));
    return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
    << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
  f << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
    << "</text>\n";
  f << "<line x1='" << ML << "' y1='" << H - MB << "' x2='" << W - MR << "' y2='"
    << H - MB << "' stroke='black'/>\n";
  f << "<line x1='" << ML << "' y1='" << MT << "' x2='" << ML << "' y2='" << H - MB
    << "' stroke='black'/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = xmin + t * (xmax - xmin) / 4.0;
    const double fyv = ymin + t * (ymax - ymin) / 4.0;
    const double fy = log_y ? std::pow(10.0, fyv) : fyv;
    f << "<text x='" << px(fx) << "' y='" << H - MB + 18
      << "' text-anchor='middle' font-size='11'>" << std::scientific << fx
      << "</text>\n";
    f << "<text x='" << ML - 6 << "' y='" << H - MB - t * (H - MT - MB) / 4.0 + 4
      << "' text-anchor='end' font-size='11'>" << std::scientific << fy << "</text>\n";
  }
  f << "<text x='" << (W + ML) / 2 << "' y='" << H - 12
    << "' text-anchor='middle' font-size='13'>" << xlabel << "</text>\n";
  f << "<text x='16' y='" << (H - MB + MT) / 2
    << "' text-anchor='middle' font-size='13' transform='rotate(-90 16 "
    << (H - MB + MT) / 2 << ")'>" << ylabel << "</text>\n";
  int ci = 0;
  for (const auto& s : series) {
    f << "<polyline fill='none' stroke='" << colors[ci % 8] << "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (log_y && !(s.y[i] > 0.0)) continue;
      f << px(s.x[i]) << "," << py(s.y[i]) << " ";
    }
    f << "'/>\n";
    f << "<text x='" << W - MR - 8 << "' y='" << MT + 16 + 16 * ci
      << "' text-anchor='end' font-size='12' fill='" << colors[ci % 8] << "'>" << s.label
      << "</text>\n";
    ++ci;
  }
  f << "</svg>\n";
}

namespace {

void write_sweep_header(std::FILE* f) {
  std::fprintf(f, "b_w,omega_w,b_x,omega_x,eta,lambda,m_star,s_star,q_star,eps_g_star,"
                  "stability,eta_boundary\n");
}

void write_sweep_row(std::FILE* f, const FixedPointConfig& c, const FixedPointReport& r) {
  const bool idw = c.quant_w.kind == QuantKind::Identity;
  const bool idx = c.quant_x.kind == QuantKind::Identity;
  std::fprintf(f, "%d,%.10g,%d,%.10g,%.10g,%.10g,%.12g,%.12g,%.12g,%.12g,%s,%.12g\n",
               idw ? 0 : c.quant_w.bits, idw ? 0.0 : c.quant_w.range,
               idx ? 0 : c.quant_x.bits, idx ? 0.0 : c.quant_x.range, c.eta, c.lambda,
               r.m_star, r.s_star, r.q_star, r.eps_g_star, to_string(r.stability),
               r.eta_boundary);
}

std::vector<double> list_or(const Config& c, const std::string& key, double dflt) {
  // either an explicit comma list, or a min/max/step range, or the scalar
  auto v = c.get_reals(key);
  if (!v.empty()) return v;
  if (c.has(key + ".min")) {
    const double lo = c.get_real(key + ".min", 0.0);
    const double hi = c.get_real(key + ".max", lo);
    const double st = c.get_real(key + ".step", 1.0);
    if (!(st > 0.0)) throw ConfigError(key + ".step must be > 0");
    std::vector<double> out;
    for (double x = lo; x <= hi + 1e-12; x += st) out.push_back(x);
    return out;
  }
  return {dflt};
}

struct SweepPoint {
  FixedPointConfig cfg;
  FixedPointReport rep;
  bool failed = false;
};

std::vector<SweepPoint> run_sweep_grid(const Config& c, int threads) {
  const FixedPointConfig base = fp_from(c);
  const bool idw = base.quant_w.kind == QuantKind::Identity;
  const bool idx = base.quant_x.kind == QuantKind::Identity;
  std::vector<double> bw = idw ? std::vector<double>{0}
                               : list_or(c, "sweep.bits_w", base.quant_w.bits);
  std::vector<double> ow = idw ? std::vector<double>{0}
                               : list_or(c, "sweep.omega_w", base.quant_w.range);
  std::vector<double> bx = idx ? std::vector<double>{0}
                               : list_or(c, "sweep.bits_x", base.quant_x.bits);
  std::vector<double> ox = idx ? std::vector<double>{0}
                               : list_or(c, "sweep.omega_x", base.quant_x.range);
  std::vector<double> etas = list_or(c, "sweep.eta", base.eta);
  std::vector<double> lams = list_or(c, "sweep.lambda", base.lambda);
  std::vector<SweepPoint> pts;
  for (double l : lams)
    for (double e : etas)
      for (double vbw : bw)
        for (double vow : ow)
          for (double vbx : bx)
            for (double vox : ox) {
              SweepPoint p;
              p.cfg = base;
              p.cfg.eta = e;
              p.cfg.lambda = l;
              if (!idw) p.cfg.quant_w = QuantizerSpec::uniform(
                  static_cast<int>(vbw), vow, base.quant_w.temperature);
              if (!idx) p.cfg.quant_x = QuantizerSpec::uniform(
                  static_cast<int>(vbx), vox, base.quant_x.temperature);
              pts.push_back(p);
            }
  std::vector<std::function<void()>> jobs;
  for (auto& p : pts)
    jobs.push_back([&p] {
      try {
        p.rep = joint_fixed_point(p.cfg);
      } catch (const DivergenceError&) {
        p.failed = true;
      }
    });
  run_pool(jobs, threads);
  return pts;
}

// ---- reproduce bundles ----

void reproduce_bundle(const Config& c, Artifacts& art, int threads, bool plot,
                      bool& any_divergence);

}  // namespace

RunOutcome run_experiment(Config cfg, const std::string& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  Artifacts art;
  art.dir = out_dir;
  json manifest;
  RunOutcome outcome;
  try {
    std::error_code ec;
    fs::create_directories(art.dir, ec);
    if (!fs::is_directory(art.dir))
      throw ConfigError("output directory not writable: " + out_dir);
    const std::string kind = cfg.get("kind", "");
    if (kind.empty()) throw ConfigError("missing config key: kind");
    const int threads = static_cast<int>(
        cfg.get_int("threads", std::thread::hardware_concurrency()));
    const bool plot = cfg.get_bool("plot", false);
    manifest["kind"] = kind;

    if (kind == "simulate") {
      const SimConfig sc = sim_from(cfg);
      const Trajectory t = run_simulation(sc);
      write_trajectory_csv(art.declare("trajectory.csv").string(), t);
      if (!t.histograms.empty())
        write_histograms_csv(art.declare("histograms.csv").string(), t);
      if (!sc.record_path.empty()) art.files.push_back(fs::path(sc.record_path).filename());
      if (plot) plot_trajectory(art, "trajectory.svg", t);
      if (t.diverged) {
        outcome.exit_code = 3;
        outcome.message = "simulation diverged at tau = " + std::to_string(t.diverged_tau);
        manifest["diverged_tau"] = t.diverged_tau;
      }
    } else if (kind == "ode") {
      const Trajectory t = integrate_ode(ode_from(cfg));
      write_trajectory_csv(art.declare("trajectory.csv").string(), t);
      if (plot) plot_trajectory(art, "trajectory.svg", t);
      if (t.diverged) {
        outcome.exit_code = 3;
        outcome.message = "ODE diverged at tau = " + std::to_string(t.diverged_tau);
        manifest["diverged_tau"] = t.diverged_tau;
      }
    } else if (kind == "pde") {
      const PdeResult r = solve_pde(pde_from(cfg));
      write_trajectory_csv(art.declare("trajectory.csv").string(), r.trajectory);
      write_pde_density_csv(art.declare("pde_density.csv").string(), r);
      manifest["clamped_mass"] = r.clamped_mass;
      if (plot) plot_trajectory(art, "trajectory.svg", r.trajectory);
      if (r.trajectory.diverged) {
        outcome.exit_code = 3;
        outcome.message = "PDE diverged at tau = " + std::to_string(r.trajectory.diverged_tau);
      }
    } else if (kind == "fixedpoint") {
      const FixedPointConfig fc = fp_from(cfg);
      const FixedPointReport rep = joint_fixed_point(fc);
      json j = report_json(rep);
      const SmallEtaExpansion se = small_eta_asymptotics(fc);
      j["small_eta"] = {{"c", se.c},
                        {"p", se.p},
                        {"regime", to_string(se.regime)},
                        {"eps0", se.eps0},
                        {"correction", se.correction}};
      std::ofstream out(art.declare("fixed_point.json"));
      out << j.dump(2) << "\n";
    } else if (kind == "sweep") {
      auto pts = run_sweep_grid(cfg, threads);
      std::FILE* f = std::fopen(art.declare("sweep.csv").string().c_str(), "w");
      if (!f) throw ConfigError("cannot open sweep.csv");
      write_sweep_header(f);
      for (const auto& p : pts)
        if (!p.failed) write_sweep_row(f, p.cfg, p.rep);
      std::fclose(f);
      if (plot) {
        PlotSeries s;
        s.label = "eps_g_star";
        for (const auto& p : pts)
          if (!p.failed && std::isfinite(p.rep.eps_g_star)) {
            s.x.push_back(p.cfg.quant_w.kind == QuantKind::Identity
                              ? p.cfg.quant_x.range
                              : p.cfg.quant_w.range);
            s.y.push_back(p.rep.eps_g_star);
          }
        write_svg_plot(art.declare("sweep.svg").string(), "stationary error", "omega",
                       "eps_g*", {s});
      }
    } else if (kind == "reproduce") {
      const std::string preset = cfg.get("preset", "");
      Config merged = preset_config(preset);
      for (const auto& [k, v] : cfg.items()) merged.set(k, v);  // user overrides win
      bool any_div = false;
      reproduce_bundle(merged, art, threads, plot, any_div);
      manifest["preset"] = preset;
      if (any_div) {
        outcome.exit_code = 3;
        outcome.message = "one or more bundle members diverged";
      }
      cfg = merged;
    } else if (kind == "compare") {
      const double tol = cfg.get_real("compare.tolerance", 0.05);
      const CompareResult r =
          compare_trajectories(cfg.get("compare.a"), cfg.get("compare.b"), tol,
                               cfg.get_bool("compare.interpolate", false));
      json j;
      j["sup_diff"] = r.sup_diff;
      j["tolerance"] = tol;
      j["within_tolerance"] = r.within;
      j["first_divergence_tau"] = r.first_divergence_tau;
      std::ofstream out(art.declare("compare.json"));
      out << j.dump(2) << "\n";
      if (!r.within) {
        outcome.exit_code = 2;
        outcome.message =
            "tolerance exceeded: sup diff " + std::to_string(r.sup_diff) +
            " first at tau " + std::to_string(r.first_divergence_tau);
      }
    } else {
      throw ConfigError("unknown kind: " + kind);
    }
  } catch (const ConfigError& e) {
    return {4, e.what()};
  } catch (const CflError& e) {
    return {4, std::string(e.what()) + " (suggested dt " + std::to_string(e.suggested_dt) + ")"};
  } catch (const ToleranceError& e) {
    return {2, e.what()};
  } catch (const DivergenceError& e) {
    return {3, e.what()};
  } catch (const std::exception& e) {
    return {4, e.what()};
  }

  // manifest last, once all artifacts are on disk
  try {
    json cfg_echo;
    for (const auto& [k, v] : cfg.items()) cfg_echo[k] = v;
    manifest["config"] = cfg_echo;
    manifest["seed"] = cfg.get_int("seed", 1);
    manifest["version"] = "1.0.0";
    manifest["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
    json sums;
    for (const auto& fn : art.files) {
      const fs::path p = art.dir / fn;
      if (fs::exists(p)) sums[fn] = file_checksum(p.string());
    }
    manifest["outputs"] = sums;
    std::ofstream mf(art.dir / "manifest.json");
    mf << manifest.dump(2) << "\n";
  } catch (const std::exception& e) {
    return {4, std::string("manifest: ") + e.what()};
  }
  return outcome;
}

namespace {

void reproduce_bundle(const Config& c, Artifacts& art, int threads, bool plot,
                      bool& any_divergence) {
  const std::string preset = c.get("preset");
  std::atomic<bool> diverged{false};

  auto sim_ode_pair = [&](const Config& item, const std::string& tag,
                          std::vector<PlotSeries>* series, std::mutex* smu) {
    const Trajectory ts = run_simulation(sim_from(item));
    write_trajectory_csv(art.declare(tag + "_sim.csv").string(), ts);
    const Trajectory to = integrate_ode(ode_from(item));
    write_trajectory_csv(art.declare(tag + "_ode.csv").string(), to);
    if (ts.diverged || to.diverged) diverged = true;
    if (series) {
      PlotSeries s;
      s.label = tag;
      for (const auto& st : to.states) {
        s.x.push_back(st.tau);
        s.y.push_back(st.eps_g);
      }
      std::lock_guard<std::mutex> lock(*smu);
      series->push_back(std::move(s));
    }
  };

  std::vector<PlotSeries> series;
  std::mutex smu;
  std::vector<std::function<void()>> jobs;
  std::vector<Config> items;  // keep configs alive for the jobs

  if (preset == "fig1") {
    Config sim = c;
    jobs.push_back([&, sim] {
      const Trajectory t = run_simulation(sim_from(sim));
      write_trajectory_csv(art.declare("fig1_sim.csv").string(), t);
      write_histograms_csv(art.declare("fig1_histograms.csv").string(), t);
      if (t.diverged) diverged = true;
    });
    jobs.push_back([&, sim] {
      const PdeResult r = solve_pde(pde_from(sim));
      write_trajectory_csv(art.declare("fig1_pde.csv").string(), r.trajectory);
      write_pde_density_csv(art.declare("fig1_pde_density.csv").string(), r);
      if (r.trajectory.diverged) diverged = true;
    });
  } else if (preset == "fig2" || preset == "fig4") {
    const auto bws = list_or(c, "sweep.bits_w", 2);
    const auto bxs = c.get_bool("inputs.identity", true)
                         ? std::vector<double>{0}
                         : list_or(c, "sweep.bits_x", 3);
    for (double bw : bws)
      for (double bx : bxs) {
        Config item = c;
        item.set("weights.bits", std::to_string(static_cast<int>(bw)));
        std::string tag = preset + "_b" + std::to_string(static_cast<int>(bw));
        if (bx != 0) {
          item.set("inputs.bits", std::to_string(static_cast<int>(bx)));
          tag += "_bx" + std::to_string(static_cast<int>(bx));
        }
        items.push_back(item);
        const std::string t = tag;
        jobs.push_back([&, idx = items.size() - 1, t] {
          sim_ode_pair(items[idx], t, plot ? &series : nullptr, &smu);
        });
      }
  } else if (preset == "fig3") {
    for (double ow : list_or(c, "sweep.omega_w", 1.0)) {
      Config item = c;
      item.set("weights.range", std::to_string(ow));
      std::ostringstream tag;
      tag << "fig3_omega" << ow;
      items.push_back(item);
      jobs.push_back([&, idx = items.size() - 1, t = tag.str()] {
        sim_ode_pair(items[idx], t, plot ? &series : nullptr, &smu);
      });
    }
  } else if (preset == "fig5") {
    // closed-form panel: stability boundary and small-eta stationary error
    // per input quantizer, no dynamics involved
    std::FILE* f = std::fopen(art.declare("fig5.csv").string().c_str(), "w");
    if (!f) throw ConfigError("cannot open fig5.csv");
    std::fprintf(f, "b_x,omega_x,kappa,sigma_sq,eta_boundary,eps_small_eta\n");
    for (double bx : list_or(c, "sweep.bits_x", 2))
      for (double ox : list_or(c, "sweep.omega_x", 1.0)) {
        FixedPointConfig fc = fp_from(c);
        fc.quant_w = QuantizerSpec::identity();
        fc.quant_x = QuantizerSpec::uniform(static_cast<int>(bx), ox);
        double kx, sx2;
        Quantizer(fc.quant_x).moments(kx, sx2);
        const SmallEtaExpansion se = small_eta_asymptotics(fc);
        std::fprintf(f, "%d,%.10g,%.12g,%.12g,%.12g,%.12g\n", static_cast<int>(bx), ox,
                     kx, sx2, 2.0 * (sx2 + fc.lambda) / (sx2 * sx2),
                     se.eps0 + se.correction);
      }
    std::fclose(f);
  } else if (preset == "fig6") {
    auto pts = run_sweep_grid(c, threads);
    std::FILE* f = std::fopen(art.declare("fig6_fixed_point.csv").string().c_str(), "w");
    if (!f) throw ConfigError("cannot open fig6_fixed_point.csv");
    write_sweep_header(f);
    for (const auto& p : pts)
      if (!p.failed) write_sweep_row(f, p.cfg, p.rep);
    std::fclose(f);
    if (c.get_bool("with.sim", false)) {
      for (double ow : c.get_reals("sim.omega_w")) {
        Config item = c;
        item.set("kind", "simulate");
        item.set("weights.range", std::to_string(ow));
        item.set("record.stride", "10000");
        std::ostringstream tag;
        tag << "fig6_sim_omega" << ow;
        items.push_back(item);
        jobs.push_back([&, idx = items.size() - 1, t = tag.str()] {
          const Trajectory ts = run_simulation(sim_from(items[idx]));
          write_trajectory_csv(art.declare(t + ".csv").string(), ts);
          if (ts.diverged) diverged = true;
        });
      }
    }
  } else if (preset == "appF") {
    for (double lam : list_or(c, "sweep.lambda", 1.0)) {
      for (double bw : list_or(c, "sweep.bits_w", 3)) {  // top row: bits at omega=1
        Config item = c;
        item.set("lambda", std::to_string(lam));
        item.set("weights.bits", std::to_string(static_cast<int>(bw)));
        item.set("weights.range", "1");
        std::ostringstream tag;
        tag << "appF_lam" << lam << "_b" << static_cast<int>(bw);
        items.push_back(item);
        jobs.push_back([&, idx = items.size() - 1, t = tag.str()] {
          const Trajectory to = integrate_ode(ode_from(items[idx]));
          write_trajectory_csv(art.declare(t + "_ode.csv").string(), to);
          if (to.diverged) diverged = true;
        });
      }
      for (double ow : list_or(c, "sweep.omega_w", 1.0)) {  // bottom row: omega at b=3
        Config item = c;
        item.set("lambda", std::to_string(lam));
        item.set("weights.bits", "3");
        item.set("weights.range", std::to_string(ow));
        std::ostringstream tag;
        tag << "appF_lam" << lam << "_omega" << ow;
        items.push_back(item);
        jobs.push_back([&, idx = items.size() - 1, t = tag.str()] {
          const Trajectory to = integrate_ode(ode_from(items[idx]));
          write_trajectory_csv(art.declare(t + "_ode.csv").string(), to);
          if (to.diverged) diverged = true;
        });
      }
    }
  } else {
    throw ConfigError("unknown preset: " + preset);
  }

  run_pool(jobs, threads);
  if (plot && !series.empty())
    write_svg_plot(art.declare(preset + "_ode.svg").string(), preset + " (ODE)", "tau",
                   "eps_g", series);
  any_divergence = diverged;
}

}  // namespace

}  // namespace stelab
