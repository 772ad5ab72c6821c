#pragma once
#include <string>
#include <vector>

#include "stelab/config.hpp"

namespace stelab {

// config-driven entry point shared by the CLI and the C API. Dispatches on
// the "kind" key (simulate | ode | pde | fixedpoint | sweep | reproduce |
// compare), writes all artifacts plus manifest.json into out_dir, and maps
// failures onto the process exit-code convention:
//   0 ok, 2 tolerance failure, 3 divergence, 4 bad config
struct RunOutcome {
  int exit_code = 0;
  std::string message;
};

RunOutcome run_experiment(Config cfg, const std::string& out_dir);

std::vector<std::string> preset_names();
Config preset_config(const std::string& name);  // reproduce bundles fig1..fig6, appF

struct CompareResult {
  double sup_diff = 0.0;
  double first_divergence_tau = -1.0;  // earliest tau where |diff| > tol, -1 if none
  bool within = true;
};

// compare the eps_g columns of two trajectory CSVs; grids must match unless
// interpolate is set (linear interpolation of b onto a's grid)
CompareResult compare_trajectories(const std::string& csv_a, const std::string& csv_b,
                                   double tolerance, bool interpolate);

// tiny dependency-free line plot (one polyline per series)
struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series, bool log_y = false);

// FNV-1a 64-bit checksum of a file (manifest bookkeeping)
std::string file_checksum(const std::string& path);

}  // namespace stelab
