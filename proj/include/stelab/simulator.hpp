#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "stelab/model.hpp"
#include "stelab/quantizer.hpp"

namespace stelab {

enum class WeightInit { GaussianStd, Zero };

struct SimConfig {
  std::size_t d = 100;
  QuantizerSpec quant_w = QuantizerSpec::uniform(2, 1.0);
  QuantizerSpec quant_x = QuantizerSpec::identity();
  TeacherSpec teacher;
  double eta = 0.05;
  double lambda = 0.0;
  double noise_var = 0.0;
  double horizon_tau = 100.0;       // steps = round(horizon_tau * d)
  double record_stride_tau = 0.1;   // observables every ~stride*d steps
  int runs = 1;
  uint64_t seed = 1;
  WeightInit init = WeightInit::GaussianStd;
  double init_scale = 1.0;
  std::vector<double> hist_taus;    // weight-histogram snapshot times
  int hist_bins = 80;
  std::string record_path;  // if set, write the (x, y) stream (run 0 only)
  std::string replay_path;  // if set, read the stream instead of sampling
};

// empirical density of {w_i : w*_i = w_star} at one snapshot time
struct HistogramSnapshot {
  double tau = 0.0;
  double w_star = 0.0;
  std::vector<double> edges;    // hist_bins + 1
  std::vector<double> density;  // hist_bins, integrates to 1
};

struct Trajectory {
  std::vector<MacroState> states;           // run-averaged
  std::vector<MacroState> stderrs;          // per-observable standard errors
  std::vector<HistogramSnapshot> histograms;
  bool diverged = false;
  double diverged_tau = 0.0;
};

// one STE update, Eq. (9):
//   w <- w - eta * [ (yhat - y)/sqrt(d) * psi_x(x) + (lambda/d) * psi_w(w) ]
void ste_step(std::vector<double>& w, const std::vector<double>& x, double y,
              const Quantizer& quant_w, const Quantizer& quant_x, double eta,
              double lambda);

// order parameters + eps_g of a microscopic state (kappa_x, sigma_sq_x are the
// input-quantizer Gaussian moments)
MacroState macro_observables(const double* w, const double* w_star, std::size_t n,
                             const Quantizer& quant_w, double kappa_x, double sigma_sq_x,
                             double rho, double noise_var, double tau);
MacroState macro_observables(const std::vector<double>& w, const std::vector<double>& w_star,
                             const Quantizer& quant_w, double kappa_x, double sigma_sq_x,
                             double rho, double noise_var, double tau);

// full one-pass SGD experiment; on blow-up (non-finite or |w_i| > 1e8) the
// partial trajectory is returned with diverged = true
Trajectory run_simulation(const SimConfig& cfg);

void write_trajectory_csv(const std::string& path, const Trajectory& traj);
void write_histograms_csv(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace stelab
