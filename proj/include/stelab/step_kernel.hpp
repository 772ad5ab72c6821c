#ifndef STELAB_STEP_KERNEL_HPP
#define STELAB_STEP_KERNEL_HPP

#include <cstddef>

namespace stelab {

// Flattened hard-quantizer constants for the simulation inner loop.
struct HardQuant {
  double omega = 0.0, inv_delta = 0.0, delta = 0.0, Lf = 0.0;
  bool identity = true;
};

// One STE update of (w, psw) given a fresh sample x; px is scratch of size d.
// y carries the label part not derived from wstar (noise, or the full label on
// replay, in which case wstar must point at zeros). Lives in a separate
// translation unit compiled with -ffast-math; it contains no NaN/Inf logic.
void step_kernel_dispatch(double* w, double* psw, const double* x, double* px,
                          const double* wstar, std::size_t d, const HardQuant& qw,
                          const HardQuant& qx, double y, double inv_sqrt_d, double eta,
                          double ridge);

}  // namespace stelab

#endif
