#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stelab/fixed_point.hpp"
#include "stelab/ode.hpp"

using namespace stelab;

TEST_CASE("TeacherMeasure: discrete teachers are exact, Gaussian normalized") {
  auto ones = TeacherMeasure::from({TeacherDist::Ones, 2.0});
  REQUIRE(ones.nodes.size() == 1);
  CHECK(ones.nodes[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(ones.weights[0] == doctest::Approx(1.0));

  auto rad = TeacherMeasure::from({TeacherDist::Rademacher, 1.0});
  REQUIRE(rad.nodes.size() == 2);
  CHECK(rad.weights[0] + rad.weights[1] == doctest::Approx(1.0));

  auto g = TeacherMeasure::from({TeacherDist::Gaussian, 1.5}, 60);
  double w = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    w += g.weights[i];
    m2 += g.weights[i] * g.nodes[i] * g.nodes[i];
  }
  CHECK(w == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m2 == doctest::Approx(1.5).epsilon(1e-10));  // E[nu^2] = rho
}

TEST_CASE("iso_moments: identity weights reduce to Gaussian-free identities") {
  // psi = id: m_psi = m, r_psi = q_psi = s^2 + m^2/rho exactly
  Quantizer id(QuantizerSpec::identity());
  auto mu = TeacherMeasure::from({TeacherDist::Rademacher, 1.3});
  const double m = 0.42, s = 0.77;
  auto im = iso_moments(m, s, id, mu);
  CHECK(im.m_psi == doctest::Approx(m).epsilon(1e-12));
  CHECK(im.q_psi == doctest::Approx(s * s + m * m / 1.3).epsilon(1e-12));
  CHECK(im.r_psi == doctest::Approx(im.q_psi).epsilon(1e-12));
}

TEST_CASE("iso_moments closed form matches the quadrature oracle") {
  for (auto dist : {TeacherDist::Ones, TeacherDist::Rademacher, TeacherDist::Gaussian}) {
    auto mu = TeacherMeasure::from({dist, 1.0}, 80);
    for (double T : {0.0, 0.3}) {
      Quantizer qw(QuantizerSpec::uniform(3, 1.0, T));
      for (double m : {0.0, 0.4, 0.9}) {
        for (double s : {0.2, 1.0}) {
          auto a = iso_moments(m, s, qw, mu);
          auto b = iso_moments_quadrature(m, s, qw, mu);
          CHECK(std::fabs(a.m_psi - b.m_psi) < 1e-8);
          CHECK(std::fabs(a.q_psi - b.q_psi) < 1e-8);
          CHECK(std::fabs(a.r_psi - b.r_psi) < 1e-8);
        }
      }
    }
  }
}

namespace {
OdeConfig identity_cfg() {
  OdeConfig cfg;
  cfg.quant_w = QuantizerSpec::identity();
  cfg.quant_x = QuantizerSpec::uniform(2, 1.0);
  cfg.teacher = {TeacherDist::Ones, 1.0};
  cfg.eta = 0.05;
  cfg.lambda = 0.2;
  cfg.noise_var = 0.1;
  cfg.horizon_tau = 400.0;
  cfg.dtau = 0.02;
  cfg.record_stride_tau = 10.0;
  return cfg;
}
}  // namespace

TEST_CASE("ODE flow signs at the start") {
  OdeSystem sys(identity_cfg());
  double dm, dq;
  sys.rhs(0.0, 1.0, dm, dq);
  CHECK(dm > 0.0);  // alignment grows from zero
}

TEST_CASE("identity weights: long integration reaches the closed-form fixed point") {
  auto cfg = identity_cfg();
  auto traj = integrate_ode(cfg);
  REQUIRE(!traj.states.empty());
  CHECK_FALSE(traj.diverged);

  FixedPointConfig fp;
  fp.quant_w = cfg.quant_w;
  fp.quant_x = cfg.quant_x;
  fp.teacher = cfg.teacher;
  fp.eta = cfg.eta;
  fp.lambda = cfg.lambda;
  fp.noise_var = cfg.noise_var;
  auto report = input_only_fixed_point(fp);
  const auto& last = traj.states.back();
  CHECK(std::fabs(last.m - report.m_star) < 1e-6);
  CHECK(std::fabs(last.q - report.q_star) < 1e-6);
  CHECK(std::fabs(last.eps_g - report.eps_g_star) < 1e-6);
}

TEST_CASE("RK4 step-size convergence is fourth order") {
  auto base = identity_cfg();
  base.horizon_tau = 10.0;
  base.record_stride_tau = 10.0;

  auto run = [&](double dtau) {
    auto cfg = base;
    cfg.dtau = dtau;
    return integrate_ode(cfg).states.back().q;
  };
  const double ref = run(0.003125);
  const double e1 = std::fabs(run(0.1) - ref);
  const double e2 = std::fabs(run(0.05) - ref);
  const double e3 = std::fabs(run(0.025) - ref);
  // error ratio per halving ~ 2^4 = 16; allow a loose band
  CHECK(e1 / e2 > 8.0);
  CHECK(e2 / e3 > 8.0);
  CHECK(e1 < 1e-6);  // absolute scale sanity
}

TEST_CASE("divergence above the learning-rate boundary is flagged") {
  auto cfg = identity_cfg();
  // input-only boundary eta_c = 2(sigma_x^2 + lambda)/sigma_x^4
  FixedPointConfig fp;
  fp.quant_w = cfg.quant_w;
  fp.quant_x = cfg.quant_x;
  fp.teacher = cfg.teacher;
  fp.lambda = cfg.lambda;
  fp.noise_var = cfg.noise_var;
  auto rep = input_only_fixed_point(fp);
  REQUIRE(rep.has_eta_boundary);
  cfg.eta = 1.2 * rep.eta_boundary;
  cfg.horizon_tau = 5000.0;
  auto traj = integrate_ode(cfg);
  CHECK(traj.diverged);
}

TEST_CASE("observables are self-consistent with generalization_error") {
  OdeSystem sys(identity_cfg());
  auto obs = sys.observables(0.3, 1.1, 7.0);
  CHECK(obs.tau == 7.0);
  CHECK(obs.s == doctest::Approx(std::sqrt(1.1 - 0.09)).epsilon(1e-12));
  double eps = generalization_error(sys.kappa_x(), sys.sigma_sq_x(), obs.m_psi, obs.q_psi,
                                    1.0, identity_cfg().noise_var);
  CHECK(obs.eps_g == doctest::Approx(eps).epsilon(1e-12));
}
