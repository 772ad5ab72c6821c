#pragma once
#include <string>
#include <utility>
#include <vector>

#include "stelab/model.hpp"
#include "stelab/ode.hpp"
#include "stelab/quantizer.hpp"

namespace stelab {

struct PdeConfig {
  QuantizerSpec quant_w = QuantizerSpec::uniform(2, 1.0);
  QuantizerSpec quant_x = QuantizerSpec::identity();
  TeacherSpec teacher;
  double eta = 0.05;
  double lambda = 0.0;
  double noise_var = 0.0;
  double wmin = 0.0, wmax = 0.0;  // 0,0 -> [-omega-4, omega+4]
  int cells = 400;
  double dt = 0.0;  // 0 -> auto (0.45 x the CFL limit, re-evaluated each step)
  double horizon_tau = 100.0;
  double record_stride_tau = 0.1;
  std::vector<double> record_taus;  // density snapshot times
  double init_mean = 0.0, init_sd = 1.0;
  int gh_nodes = 40;
};

// cell-centred finite-volume grid; one density per teacher value w* = nu_j
struct DensityGrid {
  double lo = 0.0, hi = 0.0, h = 0.0;
  std::vector<double> centers;
  std::vector<double> cond_values, cond_weights;
  std::vector<std::vector<double>> density;  // [cond][cell], integrates to 1
};

DensityGrid init_density(const PdeConfig& cfg);

// drift a_j(w) = eta (kappa_x nu_j - (sigma_x^2+lambda) psi_T(w)) at the cell
// faces, and the self-consistent diffusion D = eta^2/2 sigma_x^2 eps_g[mu]
struct PdeCoefficients {
  std::vector<std::vector<double>> face_drift;  // [cond][cells+1]
  double diffusion = 0.0;
  MacroState obs;  // order parameters of the current density
};

PdeCoefficients pde_coefficients(const DensityGrid& grid, const PdeConfig& cfg);

// one explicit upwind/central FV step with no-flux boundaries; throws CflError
// if dt violates the advective or diffusive stability limit. Returns the mass
// clamped away from tiny negative values.
double pde_step(DensityGrid& grid, const PdeCoefficients& co, double dt);

struct PdeResult {
  Trajectory trajectory;
  DensityGrid grid;  // final state
  // (tau, density snapshot) at each requested record time
  std::vector<std::pair<double, std::vector<std::vector<double>>>> snapshots;
  double clamped_mass = 0.0;
};

PdeResult solve_pde(const PdeConfig& cfg);

// schema: tau,w_star,cell_center,density
void write_pde_density_csv(const std::string& path, const PdeResult& result);

}  // namespace stelab
