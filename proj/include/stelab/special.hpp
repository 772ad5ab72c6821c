#pragma once
#include <cmath>

namespace stelab {

inline double norm_pdf(double x) {
  static constexpr double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

// erfc-based; relative error ~1e-16 everywhere including the far lower tail
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

inline double norm_sf(double x) { return 0.5 * std::erfc(x * 0.7071067811865475244); }

// Inverse normal CDF, Wichura's AS241 (double precision, |rel err| < 1e-15).
double norm_ppf(double p);

}  // namespace stelab
