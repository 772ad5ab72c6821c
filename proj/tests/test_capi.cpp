#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "stelab.h"

namespace fs = std::filesystem;

TEST_CASE("version and error strings") {
  REQUIRE(stelab_version() != nullptr);
  CHECK(std::strlen(stelab_version()) > 0);
  REQUIRE(stelab_last_error() != nullptr);
}

TEST_CASE("quantizer handle: lifecycle, apply, moments, levels") {
  stelab_quantizer* q = nullptr;
  REQUIRE(stelab_quantizer_create(2, 1.0, 0.0, &q) == STELAB_OK);
  REQUIRE(q != nullptr);

  double out = 0.0;
  CHECK(stelab_quantizer_apply(q, 0.49, &out) == STELAB_OK);
  CHECK(out == doctest::Approx(0.0));
  CHECK(stelab_quantizer_apply(q, 0.51, &out) == STELAB_OK);
  CHECK(out == doctest::Approx(1.0));

  double kappa = 0.0, s2 = 0.0;
  CHECK(stelab_quantizer_moments(q, &kappa, &s2) == STELAB_OK);
  CHECK(kappa == doctest::Approx(0.704130653528599).epsilon(1e-12));
  CHECK(s2 == doctest::Approx(0.617075077451974).epsilon(1e-12));

  size_t count = 0;
  CHECK(stelab_quantizer_levels(q, nullptr, 0, &count) == STELAB_OK);
  REQUIRE(count == 3);
  double levels[3];
  CHECK(stelab_quantizer_levels(q, levels, 3, &count) == STELAB_OK);
  CHECK(levels[0] == doctest::Approx(-1.0));
  CHECK(levels[2] == doctest::Approx(1.0));
  stelab_quantizer_destroy(q);
}

TEST_CASE("invalid quantizer spec: STELAB_ERR_CONFIG + message") {
  stelab_quantizer* q = nullptr;
  CHECK(stelab_quantizer_create(1, 1.0, 0.0, &q) == STELAB_ERR_CONFIG);
  CHECK(q == nullptr);
  CHECK(std::strlen(stelab_last_error()) > 0);
  CHECK(stelab_quantizer_create(2, -1.0, 0.0, &q) == STELAB_ERR_CONFIG);
}

TEST_CASE("identity quantizer handle") {
  stelab_quantizer* q = nullptr;
  REQUIRE(stelab_quantizer_create_identity(&q) == STELAB_OK);
  double out = 0.0;
  CHECK(stelab_quantizer_apply(q, 1.234, &out) == STELAB_OK);
  CHECK(out == 1.234);
  stelab_quantizer_destroy(q);
}

TEST_CASE("input-only fixed point through the C API") {
  stelab_fp_report rep;
  REQUIRE(stelab_input_only_fixed_point(2, 1.0, 1.0, 0.0, 0.0, 0.01, &rep) ==
          STELAB_OK);
  CHECK(rep.m_star == doctest::Approx(1.1410777703680643).epsilon(1e-12));
  CHECK(rep.eta_boundary == doctest::Approx(3.241096704566969).epsilon(1e-12));
  CHECK(rep.stability == 0);  // stable
}

TEST_CASE("joint fixed point through the C API") {
  stelab_fp_report rep;
  REQUIRE(stelab_joint_fixed_point(2, 1.2, 2, 1.0, 1.0, 0.0, 0.0, 1e-4, &rep) ==
          STELAB_OK);
  CHECK(rep.regime == 0);  // interior
  CHECK(rep.eps_g_star == doctest::Approx(0.238021).epsilon(2e-3));
  CHECK(std::isfinite(rep.m_star));
}

TEST_CASE("stelab_run: success and config failure") {
  fs::path out = fs::temp_directory_path() / "stelab_capi_run";
  fs::remove_all(out);
  fs::create_directories(out);
  const char* cfg =
      "kind = simulate\nd = 40\nweights.bits = 2\nweights.range = 1\n"
      "eta = 0.05\nlambda = 1\nhorizon = 2\nrecord.stride = 0.5\nseed = 1\n";
  CHECK(stelab_run(cfg, out.string().c_str()) == STELAB_OK);
  CHECK(fs::exists(out / "trajectory.csv"));

  CHECK(stelab_run("kind = bogus\n", out.string().c_str()) == STELAB_ERR_CONFIG);
  CHECK(std::strlen(stelab_last_error()) > 0);
  fs::remove_all(out);
}

TEST_CASE("stelab_compare on generated CSVs") {
  fs::path dir = fs::temp_directory_path() / "stelab_capi_cmp";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string a = (dir / "a.csv").string();
  {
    FILE* f = fopen(a.c_str(), "w");
    fputs("tau,m,q,s,m_psi,q_psi,r_psi,eps_g,eps_g_stderr\n0,0,1,1,0,1,0,1,0\n", f);
    fclose(f);
  }
  double sup = -1.0, tau = -2.0;
  CHECK(stelab_compare(a.c_str(), a.c_str(), 1e-12, 0, &sup, &tau) == STELAB_OK);
  CHECK(sup == doctest::Approx(0.0));
  CHECK(tau == doctest::Approx(-1.0));
  CHECK(stelab_compare("missing.csv", a.c_str(), 1e-12, 0, &sup, &tau) ==
        STELAB_ERR_CONFIG);
  fs::remove_all(dir);
}

TEST_CASE("null-pointer arguments are rejected, not crashed on") {
  CHECK(stelab_quantizer_create(2, 1.0, 0.0, nullptr) == STELAB_ERR_CONFIG);
  stelab_quantizer* q = nullptr;
  REQUIRE(stelab_quantizer_create(2, 1.0, 0.0, &q) == STELAB_OK);
  CHECK(stelab_quantizer_apply(q, 0.0, nullptr) == STELAB_ERR_CONFIG);
  CHECK(stelab_quantizer_apply(nullptr, 0.0, nullptr) == STELAB_ERR_CONFIG);
  stelab_quantizer_destroy(q);
  stelab_quantizer_destroy(nullptr);  // no-op
}
