#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stelab/quadrature.hpp"
#include "stelab/special.hpp"

using namespace stelab;

TEST_CASE("norm_cdf at reference points") {
  // [TRIVIAL] textbook values of the standard normal CDF
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(norm_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-14));
  CHECK(norm_cdf(-1.0) == doctest::Approx(0.15865525393145705).epsilon(1e-14));
  CHECK(norm_cdf(1.0) + norm_cdf(-1.0) == doctest::Approx(1.0).epsilon(1e-15));
  // far tail stays accurate (erfc-based, no cancellation)
  CHECK(norm_cdf(-38.0) > 0.0);
  CHECK(norm_cdf(-8.0) == doctest::Approx(6.220960574271786e-16).epsilon(1e-12));
  CHECK(norm_sf(8.0) == doctest::Approx(6.220960574271786e-16).epsilon(1e-12));
}

TEST_CASE("norm_pdf value and normalization") {
  CHECK(norm_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
  // [DERIVED] integral of the pdf over [-10, 10] via the project quadrature
  double mass = integrate_adaptive([](double x) { return norm_pdf(x); }, -10.0, 10.0, 1e-12);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("norm_ppf inverts norm_cdf across the range") {
  for (double p = 1e-12; p < 1.0; p = p < 0.5 ? p * 3.7 : 1.0 - (1.0 - p) / 3.7) {
    double x = norm_ppf(p);
    CHECK(norm_cdf(x) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(norm_ppf(0.5) == doctest::Approx(0.0));
  CHECK(norm_ppf(0.9750021048517795) == doctest::Approx(1.96).epsilon(1e-12));
}
