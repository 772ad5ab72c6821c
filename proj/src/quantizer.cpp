#include "stelab/quantizer.hpp"

#include <algorithm>

#include "stelab/quadrature.hpp"
#include "stelab/special.hpp"

namespace stelab {

Quantizer::Quantizer(const QuantizerSpec& spec) : spec_(spec) {
  if (spec.kind == QuantKind::Identity) return;
  if (spec.bits < 2) throw ConfigError("quantizer: bits must be >= 2");
  if (spec.bits > 30) throw ConfigError("quantizer: bits too large");
  if (!(spec.range > 0.0)) throw ConfigError("quantizer: range must be > 0");
  if (!(spec.temperature >= 0.0)) throw ConfigError("quantizer: temperature must be >= 0");
  const int L = (1 << spec.bits) - 2;
  grid_.L = L;
  grid_.delta = 2.0 * spec.range / L;
  inv_delta_ = 1.0 / grid_.delta;
  grid_.levels.resize(L + 1);
  grid_.thresholds.resize(L);
  for (int k = 0; k <= L; ++k) grid_.levels[k] = -spec.range + k * grid_.delta;
  for (int k = 1; k <= L; ++k)
    grid_.thresholds[k - 1] = -spec.range + (k - 0.5) * grid_.delta;
}

double Quantizer::soft(double x) const {
  double acc = -spec_.range;
  const double invT = 1.0 / spec_.temperature;
  for (double th : grid_.thresholds) acc += grid_.delta * norm_cdf((x - th) * invT);
  return acc;
}

void Quantizer::moments(double& kappa, double& sigma_sq) const {
  if (is_identity()) {
    kappa = 1.0;
    sigma_sq = 1.0;
    return;
  }
  if (spec_.temperature != 0.0)
    throw ConfigError("quantizer moments: closed form requires temperature 0");
  // kappa = E[X psi(X)] = Delta * sum_k phi(theta_k)  (Stein / summation by parts)
  kappa = 0.0;
  for (double th : grid_.thresholds) kappa += norm_pdf(th);
  kappa *= grid_.delta;
  // sigma^2 = sum_k v_k^2 * P(theta_k < X <= theta_{k+1}), theta_0 = -inf
  sigma_sq = 0.0;
  double prev = 0.0;  // Phi(theta_0)
  for (int k = 0; k <= grid_.L; ++k) {
    const double next = (k == grid_.L) ? 1.0 : norm_cdf(grid_.thresholds[k]);
    const double v = grid_.levels[k];
    sigma_sq += v * v * (next - prev);
    prev = next;
  }
}

void Quantizer::moments_quadrature(double& kappa, double& sigma_sq) const {
  if (is_identity()) {
    kappa = 1.0;
    sigma_sq = 1.0;
    return;
  }
  if (spec_.temperature != 0.0)
    throw ConfigError("quantizer moments: quadrature oracle requires temperature 0");
  // integrate x*psi(x)*phi(x) and psi(x)^2*phi(x) piecewise between thresholds
  std::vector<double> pts;
  pts.push_back(-12.0);
  for (double th : grid_.thresholds) pts.push_back(th);
  pts.push_back(12.0);
  kappa = 0.0;
  sigma_sq = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    // psi is constant on the open interval; evaluate at the midpoint
    const double v = hard(0.5 * (pts[i] + pts[i + 1]));
    kappa += v * integrate_adaptive(
                     [](double x) { return x * norm_pdf(x); }, pts[i], pts[i + 1], 1e-14);
    sigma_sq += v * v * integrate_adaptive(
                            [](double x) { return norm_pdf(x); }, pts[i], pts[i + 1], 1e-14);
  }
}

double kernel_cdf(double m, double s, double a, double T) {
  const double w = std::sqrt(s * s + T * T);
  if (w == 0.0) return m > a ? 1.0 : (m < a ? 0.0 : 0.5);
  return norm_cdf((m - a) / w);
}

double kernel_pdf(double m, double s, double a, double T) {
  const double w = std::sqrt(s * s + T * T);
  if (w == 0.0) return 0.0;
  return (T / w) * norm_pdf((m - a) / w);
}

double kernel_xcdf(double m, double s, double a, double T) {
  const double w = std::sqrt(s * s + T * T);
  if (w == 0.0) return m * (m > a ? 1.0 : (m < a ? 0.0 : 0.5));
  const double u = (m - a) / w;
  return m * norm_cdf(u) + (s * s / w) * norm_pdf(u);
}

double kernel_cdf2(double m, double s, double a, double b, double T) {
  if (T == 0.0) return kernel_cdf(m, s, std::max(a, b), 0.0);
  if (s == 0.0) return norm_cdf((m - a) / T) * norm_cdf((m - b) / T);
  const double invs = 1.0 / s, invT = 1.0 / T;
  auto f = [&](double x) {
    return invs * norm_pdf((x - m) * invs) * norm_cdf((x - a) * invT) *
           norm_cdf((x - b) * invT);
  };
  return integrate_adaptive(f, m - 10.0 * s, m + 10.0 * s, 1e-13);
}

void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  // Roots of the orthonormal probabilist Hermite polynomial p_n found by
  // interlacing + bisection (roots of p_{k+1} separate those of p_k), then
  // weights w_i = 1 / (n * p_{n-1}(x_i)^2); the rule satisfies
  // sum_i w_i f(x_i) ~ E[f(Z)], Z ~ N(0,1).
  if (n < 1) throw ConfigError("gauss_hermite: n must be >= 1");
  auto eval = [](int k, double x) {
    // orthonormal: p_{j+1} = (x p_j - sqrt(j) p_{j-1}) / sqrt(j+1)
    double pm = 0.0, p = 1.0;
    for (int j = 0; j < k; ++j) {
      const double t = (x * p - std::sqrt(static_cast<double>(j)) * pm) /
                       std::sqrt(static_cast<double>(j + 1));
      pm = p;
      p = t;
    }
    return p;
  };
  std::vector<double> roots{0.0};  // He_1
  for (int k = 2; k <= n; ++k) {
    const double bound = std::sqrt(4.0 * k + 2.0);
    std::vector<double> brk;
    brk.push_back(-bound);
    brk.insert(brk.end(), roots.begin(), roots.end());
    brk.push_back(bound);
    std::vector<double> next(k);
    for (int i = 0; i < k; ++i) {
      double a = brk[i], b = brk[i + 1];
      double fa = eval(k, a);
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = eval(k, m);
        if ((fa < 0.0) == (fm < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
        if (b - a < 1e-15 * (1.0 + std::fabs(a))) break;
      }
      next[i] = 0.5 * (a + b);
    }
    roots = std::move(next);
  }
  nodes = roots;
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double pn1 = eval(n - 1, nodes[i]);
    weights[i] = 1.0 / (n * pn1 * pn1);
  }
}

}  // namespace stelab
