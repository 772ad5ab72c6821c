// stelab: one CLI in front of the simulator, ODE/PDE engines and fixed-point
// solver. Talks to the core exclusively through the C API in stelab.h.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stelab.h"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::string seed;
  std::string threads;
  bool plot = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "key = value config file");
  cmd->add_option("--out", o.out_dir, "output directory (default: out)");
  cmd->add_option("--seed", o.seed, "master RNG seed (u64)");
  cmd->add_option("--threads", o.threads, "worker threads for sweeps/bundles");
  cmd->add_flag("--plot", o.plot, "emit SVG plots next to the CSVs");
}

int run_kind(const std::string& kind, const CommonOpts& o,
             const std::vector<std::pair<std::string, std::string>>& extra) {
  std::ostringstream text;
  if (!o.config_path.empty()) {
    std::ifstream f(o.config_path);
    if (!f) {
      std::fprintf(stderr, "error: cannot open config file %s\n", o.config_path.c_str());
      return 4;
    }
    text << f.rdbuf() << "\n";
  }
  // flag-set keys go last and are pinned above STELAB_* env overrides
  std::string pinned = "kind";
  text << "kind = " << kind << "\n";
  auto pin = [&](const std::string& k, const std::string& v) {
    text << k << " = " << v << "\n";
    pinned += "," + k;
  };
  if (!o.seed.empty()) pin("seed", o.seed);
  if (!o.threads.empty()) pin("threads", o.threads);
  if (o.plot) pin("plot", "true");
  for (const auto& [k, v] : extra) pin(k, v);
  text << "cli.overrides = " << pinned << "\n";

  const stelab_status st = stelab_run(text.str().c_str(), o.out_dir.c_str());
  if (st != STELAB_OK) std::fprintf(stderr, "error: %s\n", stelab_last_error());
  return static_cast<int>(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stelab -- STE quantized linear regression laboratory"};
  app.require_subcommand(1);

  CommonOpts o_sim, o_ode, o_pde, o_fp, o_sweep, o_rep, o_cmp;
  add_common(app.add_subcommand("simulate", "finite-d stochastic simulation"), o_sim);
  add_common(app.add_subcommand("ode", "macroscopic ODE integration"), o_ode);
  add_common(app.add_subcommand("pde", "Fokker-Planck density evolution"), o_pde);
  add_common(app.add_subcommand("fixedpoint", "fixed point + stability report"), o_fp);
  add_common(app.add_subcommand("sweep", "fixed-point parameter sweep"), o_sweep);

  auto* rep = app.add_subcommand("reproduce", "figure-reproduction presets");
  std::string preset;
  rep->add_option("preset", preset, "fig1|fig2|fig3|fig4|fig5|fig6|appF")->required();
  add_common(rep, o_rep);

  auto* cmp = app.add_subcommand("compare", "sup-norm diff of two trajectory CSVs");
  std::string cmp_a, cmp_b;
  double cmp_tol = 0.05;
  bool cmp_interp = false;
  cmp->add_option("a", cmp_a, "first trajectory CSV")->required();
  cmp->add_option("b", cmp_b, "second trajectory CSV")->required();
  cmp->add_option("--tolerance", cmp_tol, "sup-norm tolerance (default 0.05)");
  cmp->add_flag("--interpolate", cmp_interp, "allow differing tau grids");
  add_common(cmp, o_cmp);

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("simulate")) return run_kind("simulate", o_sim, {});
  if (app.got_subcommand("ode")) return run_kind("ode", o_ode, {});
  if (app.got_subcommand("pde")) return run_kind("pde", o_pde, {});
  if (app.got_subcommand("fixedpoint")) return run_kind("fixedpoint", o_fp, {});
  if (app.got_subcommand("sweep")) return run_kind("sweep", o_sweep, {});
  if (app.got_subcommand("reproduce"))
    return run_kind("reproduce", o_rep, {{"preset", preset}});
  if (app.got_subcommand("compare")) {
    std::ostringstream tol;
    tol << cmp_tol;
    return run_kind("compare", o_cmp,
                    {{"compare.a", cmp_a},
                     {"compare.b", cmp_b},
                     {"compare.tolerance", tol.str()},
                     {"compare.interpolate", cmp_interp ? "true" : "false"}});
  }
  return 4;
}
