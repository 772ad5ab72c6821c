#include "stelab.h"

#include <cstring>
#include <string>

#include "stelab/errors.hpp"
#include "stelab/experiments.hpp"
#include "stelab/fixed_point.hpp"
#include "stelab/quantizer.hpp"

using namespace stelab;

namespace {

thread_local std::string g_last_error;

stelab_status fail(stelab_status code, const char* msg) {
  g_last_error = msg;
  return code;
}

template <class F>
stelab_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return STELAB_OK;
  } catch (const ConfigError& e) {
    return fail(STELAB_ERR_CONFIG, e.what());
  } catch (const ToleranceError& e) {
    return fail(STELAB_ERR_TOLERANCE, e.what());
  } catch (const DivergenceError& e) {
    return fail(STELAB_ERR_DIVERGENCE, e.what());
  } catch (const CflError& e) {
    return fail(STELAB_ERR_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(STELAB_ERR_RUNTIME, e.what());
  }
}

void fill_report(const FixedPointReport& r, stelab_fp_report* out) {
  out->m_star = r.m_star;
  out->q_star = r.q_star;
  out->s_star = r.s_star;
  out->eps_g_star = r.eps_g_star;
  std::memcpy(out->jacobian, r.jac, sizeof r.jac);
  std::memcpy(out->eig_re, r.eig_re, sizeof r.eig_re);
  std::memcpy(out->eig_im, r.eig_im, sizeof r.eig_im);
  switch (r.stability) {
    case Stability::Stable: out->stability = 0; break;
    case Stability::Marginal: out->stability = 1; break;
    case Stability::Unstable: out->stability = 2; break;
    default: out->stability = 3; break;
  }
  switch (r.regime) {
    case Regime::Interior: out->regime = 0; break;
    case Regime::Boundary: out->regime = 1; break;
    default: out->regime = 2; break;
  }
  out->eta_boundary = r.eta_boundary;
  out->eta_boundary_exact = r.has_eta_boundary ? 1 : 0;
  out->residual = r.residual;
}

}  // namespace

extern "C" {

const char* stelab_version(void) { return "1.0.0"; }

const char* stelab_last_error(void) { return g_last_error.c_str(); }

struct stelab_quantizer {
  Quantizer impl;
};

stelab_status stelab_quantizer_create(int bits, double range, double temperature,
                                      stelab_quantizer** out) {
  if (!out) return fail(STELAB_ERR_CONFIG, "null output pointer");
  return guard([&] {
    *out = new stelab_quantizer{Quantizer(QuantizerSpec::uniform(bits, range, temperature))};
  });
}

stelab_status stelab_quantizer_create_identity(stelab_quantizer** out) {
  if (!out) return fail(STELAB_ERR_CONFIG, "null output pointer");
  return guard([&] { *out = new stelab_quantizer{Quantizer(QuantizerSpec::identity())}; });
}

void stelab_quantizer_destroy(stelab_quantizer* q) { delete q; }

stelab_status stelab_quantizer_apply(const stelab_quantizer* q, double x, double* out) {
  if (!q || !out) return fail(STELAB_ERR_CONFIG, "null argument");
  return guard([&] { *out = q->impl.apply(x); });
}

stelab_status stelab_quantizer_moments(const stelab_quantizer* q, double* kappa,
                                       double* sigma_sq) {
  if (!q || !kappa || !sigma_sq) return fail(STELAB_ERR_CONFIG, "null argument");
  return guard([&] { q->impl.moments(*kappa, *sigma_sq); });
}

stelab_status stelab_quantizer_levels(const stelab_quantizer* q, double* buf, size_t cap,
                                      size_t* count) {
  if (!q || !count) return fail(STELAB_ERR_CONFIG, "null argument");
  return guard([&] {
    const auto& lv = q->impl.grid().levels;
    *count = lv.size();
    if (buf)
      for (size_t i = 0; i < cap && i < lv.size(); ++i) buf[i] = lv[i];
  });
}

stelab_status stelab_input_only_fixed_point(int bits_x, double omega_x, double rho,
                                            double noise_var, double lambda, double eta,
                                            stelab_fp_report* out) {
  if (!out) return fail(STELAB_ERR_CONFIG, "null output pointer");
  return guard([&] {
    FixedPointConfig cfg;
    cfg.quant_w = QuantizerSpec::identity();
    cfg.quant_x = bits_x > 0 ? QuantizerSpec::uniform(bits_x, omega_x)
                             : QuantizerSpec::identity();
    cfg.teacher.rho = rho;
    cfg.noise_var = noise_var;
    cfg.lambda = lambda;
    cfg.eta = eta;
    fill_report(input_only_fixed_point(cfg), out);
  });
}

stelab_status stelab_joint_fixed_point(int bits_w, double omega_w, int bits_x,
                                       double omega_x, double rho, double noise_var,
                                       double lambda, double eta, stelab_fp_report* out) {
  if (!out) return fail(STELAB_ERR_CONFIG, "null output pointer");
  return guard([&] {
    FixedPointConfig cfg;
    cfg.quant_w = bits_w > 0 ? QuantizerSpec::uniform(bits_w, omega_w)
                             : QuantizerSpec::identity();
    cfg.quant_x = bits_x > 0 ? QuantizerSpec::uniform(bits_x, omega_x)
                             : QuantizerSpec::identity();
    cfg.teacher.rho = rho;
    cfg.noise_var = noise_var;
    cfg.lambda = lambda;
    cfg.eta = eta;
    fill_report(joint_fixed_point(cfg), out);
  });
}

stelab_status stelab_run(const char* config_text, const char* out_dir) {
  if (!config_text || !out_dir) return fail(STELAB_ERR_CONFIG, "null argument");
  stelab_status st = STELAB_OK;
  std::string msg;
  const stelab_status g = guard([&] {
    const Config raw = Config::parse_text(config_text);
    Config cfg = raw;
    cfg.apply_env();
    // keys named in cli.overrides keep their text value even over STELAB_*
    // env vars (the CLI lists its explicit flags there)
    if (raw.has("cli.overrides")) {
      std::string list = raw.get("cli.overrides"), key;
      for (std::size_t i = 0; i <= list.size(); ++i) {
        if (i == list.size() || list[i] == ',') {
          if (!key.empty() && raw.has(key)) cfg.set(key, raw.get(key));
          key.clear();
        } else if (!std::isspace(static_cast<unsigned char>(list[i]))) {
          key += list[i];
        }
      }
    }
    const RunOutcome r = run_experiment(cfg, out_dir);
    if (r.exit_code != 0) {
      msg = r.message;
      st = static_cast<stelab_status>(r.exit_code);
    }
  });
  if (g != STELAB_OK) return g;
  if (st != STELAB_OK) g_last_error = msg;
  return st;
}

stelab_status stelab_compare(const char* csv_a, const char* csv_b, double tolerance,
                             int interpolate, double* sup_diff,
                             double* first_divergence_tau) {
  if (!csv_a || !csv_b) return fail(STELAB_ERR_CONFIG, "null argument");
  CompareResult res;
  const stelab_status g = guard([&] {
    res = compare_trajectories(csv_a, csv_b, tolerance, interpolate != 0);
  });
  if (g != STELAB_OK) return g;
  if (sup_diff) *sup_diff = res.sup_diff;
  if (first_divergence_tau) *first_divergence_tau = res.first_divergence_tau;
  if (!res.within)
    return fail(STELAB_ERR_TOLERANCE, "trajectories differ beyond tolerance");
  return STELAB_OK;
}

}  // extern "C"
