#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "stelab/quantizer.hpp"
#include "stelab/rng.hpp"

namespace stelab {

// teacher vector w* with ||w*||^2/d -> rho
enum class TeacherDist { Ones, Rademacher, Gaussian };

struct TeacherSpec {
  TeacherDist dist = TeacherDist::Ones;
  double rho = 1.0;
};

std::vector<double> sample_teacher(std::size_t d, const TeacherSpec& spec, uint64_t seed);

// y = x . w* / sqrt(d) + noise,  yhat = psi_x(x) . psi_w(w) / sqrt(d)
double predict(const std::vector<double>& w, const std::vector<double>& x,
               const Quantizer& quant_w, const Quantizer& quant_x);

// eps_g = sigma_psi^2 * q_psi - 2 kappa_psi * m_psi + rho + noise_var,
// with (kappa_psi, sigma_psi^2) the input-quantizer Gaussian moments and
// (m_psi, q_psi) the quantized-weight overlaps
double generalization_error(double kappa_x, double sigma_sq_x, double m_psi, double q_psi,
                            double rho, double noise_var);

// covariance of the local fields (A,B,C,D) =
// (w*.x, w*.psi(x), w.psi(x), psi(w).psi(x)) / sqrt(d) in the d -> inf CLT,
// given order parameters and input-quantizer moments
std::array<double, 16> local_field_covariance(double kappa_x, double sigma_sq_x, double rho,
                                              double m, double q, double m_psi,
                                              double r_psi, double q_psi);

// order parameters of a microscopic state
struct MacroState {
  double tau = 0.0;
  double m = 0.0, q = 0.0, s = 0.0;
  double m_psi = 0.0, q_psi = 0.0, r_psi = 0.0;
  double eps_g = 0.0;
  double eps_g_stderr = 0.0;
};

// ---- record / replay of a data stream (bitwise-reproducible runs) ----
// binary layout: "STEL" magic, u32 version, u64 d, u64 seed, then per step
// d doubles (x) followed by one double (y), little-endian
class RecordWriter {
 public:
  RecordWriter(const std::string& path, std::size_t d, uint64_t seed);
  ~RecordWriter();
  void append(const double* x, double y);

 private:
  struct Impl;
  Impl* impl_;
};

class RecordReader {
 public:
  explicit RecordReader(const std::string& path);
  ~RecordReader();
  std::size_t dim() const;
  uint64_t seed() const;
  // false at end of stream
  bool next(double* x, double& y);

 private:
  struct Impl;
  Impl* impl_;
};

}  // namespace stelab
