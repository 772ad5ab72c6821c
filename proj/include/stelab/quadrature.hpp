#pragma once
#include <cmath>
#include <vector>

namespace stelab {

// adaptive Simpson with absolute tolerance; plenty for the smooth Gaussian
// integrands used here
namespace detail {
template <class F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

template <class F>
double integrate_adaptive(const F& f, double a, double b, double tol = 1e-12,
                          int max_depth = 40) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Gauss-Hermite rule in "probabilist" form: sum_i w_i f(x_i) ~ E[f(Z)],
// Z ~ N(0,1). Nodes by Newton on the Hermite recurrence.
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace stelab
