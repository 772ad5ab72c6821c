// Hot inner loop of the STE simulator. This file is compiled with -ffast-math
// (see CMakeLists.txt) so the dot-product reductions and the floor-based
// quantization vectorize; keep any NaN/Inf-sensitive logic out of this TU.
#include "stelab/step_kernel.hpp"

#include <cmath>

namespace stelab {

namespace {

template <bool IDW, bool IDX, bool RIDGE>
void step_kernel(double* __restrict w, double* __restrict psw, const double* __restrict x,
                 double* __restrict px, const double* __restrict wstar, std::size_t d,
                 const HardQuant& qw, const HardQuant& qx, double y, double inv_sqrt_d,
                 double eta, double ridge) {
  const double xw = qx.omega, xid = qx.inv_delta, xl = qx.Lf, xd = qx.delta;
  const double ww = qw.omega, wid = qw.inv_delta, wl = qw.Lf, wd = qw.delta;
  double a = 0.0, dot = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double xi = x[i];
    double p;
    if constexpr (IDX) {
      p = xi;
    } else {
      double k = std::floor((xi + xw) * xid + 0.5);
      k = k < 0.0 ? 0.0 : (k > xl ? xl : k);
      p = k * xd - xw;
    }
    a += wstar[i] * xi;
    dot += psw[i] * p;
    px[i] = p;
  }
  const double yl = y + a * inv_sqrt_d;
  const double yhat = dot * inv_sqrt_d;
  const double coef = -eta * (yhat - yl) * inv_sqrt_d;
  for (std::size_t i = 0; i < d; ++i) {
    double wi = w[i] + coef * px[i];
    if constexpr (RIDGE) wi -= ridge * psw[i];
    w[i] = wi;
    if constexpr (IDW) {
      psw[i] = wi;
    } else {
      double k = std::floor((wi + ww) * wid + 0.5);
      k = k < 0.0 ? 0.0 : (k > wl ? wl : k);
      psw[i] = k * wd - ww;
    }
  }
}

}  // namespace

void step_kernel_dispatch(double* w, double* psw, const double* x, double* px,
                          const double* wstar, std::size_t d, const HardQuant& qw,
                          const HardQuant& qx, double y, double inv_sqrt_d, double eta,
                          double ridge) {
  const bool r = ridge != 0.0;
  if (qw.identity && qx.identity)
    r ? step_kernel<true, true, true>(w, psw, x, px, wstar, d, qw, qx, y, inv_sqrt_d, eta, ridge)
      : step_kernel<true, true, false>(w, psw, x, px, wstar, d, qw, qx, y, inv_sqrt_d, eta, ridge);
  else if (qw.identity)
    r ? step_kernel<true, false, true>(w, psw, x, px, wstar, d, qw, qx, y, inv_sqrt_d, eta, ridge)
      : step_kernel<true, false, false>(w, psw, x, px, wstar, d, qw, qx, y, inv_sqrt_d, eta, ridge);
  else if (qx.identity)
    r ? step_kernel<false, true, true>(w, psw, x, px, wstar, d, qw, qx, y, inv_sqrt_d, eta, ridge)
      : step_kernel<false, true, false>(w, psw, x, px, wstar, d, qw, qx, y, inv_sqrt_d, eta, ridge);
  else
    r ? step_kernel<false, false, true>(w, psw, x, px, wstar, d, qw, qx, y, inv_sqrt_d, eta, ridge)
      : step_kernel<false, false, false>(w, psw, x, px, wstar, d, qw, qx, y, inv_sqrt_d, eta, ridge);
}

}  // namespace stelab
