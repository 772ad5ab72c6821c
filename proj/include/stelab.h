/* C interface to the STE quantized-regression laboratory.
 *
 * All functions return stelab_status; on error, stelab_last_error() gives a
 * human-readable message for the calling thread. Handles are opaque and must
 * be released with their destroy function. */
#ifndef STELAB_H
#define STELAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  STELAB_OK = 0,
  STELAB_ERR_TOLERANCE = 2, /* compare/tolerance failure */
  STELAB_ERR_DIVERGENCE = 3,
  STELAB_ERR_CONFIG = 4,
  STELAB_ERR_RUNTIME = 5
} stelab_status;

const char* stelab_version(void);
/* message from the most recent failing call on this thread; "" if none */
const char* stelab_last_error(void);

/* ---- quantizer ---- */
typedef struct stelab_quantizer stelab_quantizer;

/* uniform symmetric quantizer with 2^bits - 1 levels on [-range, range];
 * temperature 0 is the hard quantizer, > 0 the soft (erf-smoothed) one */
stelab_status stelab_quantizer_create(int bits, double range, double temperature,
                                      stelab_quantizer** out);
stelab_status stelab_quantizer_create_identity(stelab_quantizer** out);
void stelab_quantizer_destroy(stelab_quantizer* q);
stelab_status stelab_quantizer_apply(const stelab_quantizer* q, double x, double* out);
/* Gaussian moments kappa = E[X psi(X)], sigma_sq = E[psi(X)^2], X ~ N(0,1) */
stelab_status stelab_quantizer_moments(const stelab_quantizer* q, double* kappa,
                                       double* sigma_sq);
/* copies the level values into buf (capacity cap); *count gets the number of
 * levels regardless, so call with cap = 0 to size the buffer */
stelab_status stelab_quantizer_levels(const stelab_quantizer* q, double* buf, size_t cap,
                                      size_t* count);

/* ---- fixed points ---- */
typedef struct {
  double m_star, q_star, s_star, eps_g_star;
  double jacobian[4]; /* row-major; (m,q) coords for input-only, (m,s) for joint */
  double eig_re[2], eig_im[2];
  int stability;      /* 0 stable, 1 marginal, 2 unstable, 3 none */
  int regime;         /* 0 interior, 1 boundary, 2 saturated */
  double eta_boundary;
  int eta_boundary_exact;
  double residual;
} stelab_fp_report;

/* identity weight quantizer, quantized inputs: closed form */
stelab_status stelab_input_only_fixed_point(int bits_x, double omega_x, double rho,
                                            double noise_var, double lambda, double eta,
                                            stelab_fp_report* out);

/* quantized weights (bits_w >= 2); pass bits_x = 0 for identity inputs */
stelab_status stelab_joint_fixed_point(int bits_w, double omega_w, int bits_x,
                                       double omega_x, double rho, double noise_var,
                                       double lambda, double eta, stelab_fp_report* out);

/* ---- config-driven runner ----
 * config_text uses the same key = value format as the CLI; artifacts and
 * manifest.json are written into out_dir. The status mirrors the CLI exit
 * code (0/2/3/4). */
stelab_status stelab_run(const char* config_text, const char* out_dir);

/* sup-norm comparison of the eps_g columns of two trajectory CSVs */
stelab_status stelab_compare(const char* csv_a, const char* csv_b, double tolerance,
                             int interpolate, double* sup_diff,
                             double* first_divergence_tau);

#ifdef __cplusplus
}
#endif
#endif /* STELAB_H */
