#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "stelab/model.hpp"
#include "stelab/quantizer.hpp"

using namespace stelab;

TEST_CASE("sample_teacher: distributions and normalization") {
  const std::size_t d = 5000;
  auto ones = sample_teacher(d, {TeacherDist::Ones, 1.0}, 1);
  for (double v : ones) REQUIRE(v == 1.0);

  auto rad = sample_teacher(d, {TeacherDist::Rademacher, 1.0}, 1);
  double q = 0.0;
  int plus = 0;
  for (double v : rad) {
    REQUIRE((v == 1.0 || v == -1.0));
    q += v * v;
    plus += v > 0;
  }
  CHECK(q / d == doctest::Approx(1.0));
  CHECK(std::fabs(plus - 0.5 * d) < 5.0 * std::sqrt(0.25 * d));  // fair coin

  // rho scales the norm: ||w*||^2/d ~ rho
  auto g = sample_teacher(d, {TeacherDist::Gaussian, 2.0}, 7);
  double q2 = 0.0;
  for (double v : g) q2 += v * v;
  // var of q2/d is 2 rho^2 * 2 / d (4th moment of Gaussian); 5 sigma
  CHECK(std::fabs(q2 / d - 2.0) < 5.0 * 2.0 * std::sqrt(2.0 / d));

  // determinism per seed
  CHECK(sample_teacher(64, {TeacherDist::Gaussian, 1.0}, 3) ==
        sample_teacher(64, {TeacherDist::Gaussian, 1.0}, 3));
}

TEST_CASE("predict: hand-computed small case") {
  // d = 4, identity input, b=2 omega=1 weights
  Quantizer qw(QuantizerSpec::uniform(2, 1.0));
  Quantizer qx(QuantizerSpec::identity());
  std::vector<double> w = {0.6, -0.2, 1.7, -0.49};   // psi(w) = {1, 0, 1, 0}
  std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  CHECK(predict(w, x, qw, qx) == doctest::Approx((1.0 + 3.0) / 2.0).epsilon(1e-14));
}

TEST_CASE("generalization_error: frozen oracle") {
  // [DERIVED] identity weights fully aligned with a rho=1 teacher, inputs
  // quantized b=2 omega=1: eps = 1 + sigma^2 - 2 kappa = 0.2088137703947759
  const double kx = 0.704130653528599, sx2 = 0.617075077451974;
  CHECK(generalization_error(kx, sx2, 1.0, 1.0, 1.0, 0.0) ==
        doctest::Approx(0.2088137703947759).epsilon(1e-12));
  // identity inputs, perfect recovery: eps = noise floor  [TRIVIAL]
  CHECK(generalization_error(1.0, 1.0, 1.0, 1.0, 1.0, 0.25) ==
        doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("local_field_covariance: symmetry, PSD diagonal, identity case") {
  auto C = local_field_covariance(0.9, 1.1, 1.0, 0.5, 1.2, 0.45, 1.1, 1.3);
  for (int i = 0; i < 4; ++i) {
    CHECK(C[4 * i + i] > 0.0);
    for (int j = 0; j < 4; ++j) CHECK(C[4 * i + j] == doctest::Approx(C[4 * j + i]));
  }
  // identity input and weight quantizers: fields collapse pairwise,
  // Cov = [[rho, rho, m, m], [rho, rho, m, m], [m, m, q, q], [m, m, q, q]]
  auto I = local_field_covariance(1.0, 1.0, 1.5, 0.4, 0.9, 0.4, 0.9, 0.9);
  const double rho = 1.5, m = 0.4, q = 0.9;
  const double expect[16] = {rho, rho, m, m, rho, rho, m, m,
                             m,   m,   q, q, m,   m,   q, q};
  for (int i = 0; i < 16; ++i) CHECK(I[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("record/replay roundtrip is bitwise exact") {
  const char* path = "test_model_stream.bin";
  const std::size_t d = 7;
  std::vector<double> x0 = {0.1, -0.2, 0.3, -0.4, 0.5, -0.6, 0.7};
  std::vector<double> x1 = {1.5, 2.5, -3.5, 4.5, -5.5, 6.5, -7.5};
  {
    RecordWriter wr(path, d, 12345);
    wr.append(x0.data(), 0.25);
    wr.append(x1.data(), -1.75);
  }
  RecordReader rd(path);
  CHECK(rd.dim() == d);
  CHECK(rd.seed() == 12345);
  std::vector<double> x(d);
  double y;
  REQUIRE(rd.next(x.data(), y));
  CHECK(x == x0);
  CHECK(y == 0.25);
  REQUIRE(rd.next(x.data(), y));
  CHECK(x == x1);
  CHECK(y == -1.75);
  CHECK_FALSE(rd.next(x.data(), y));
  std::remove(path);
}
