#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "sdbbm/special_functions.hpp"

using namespace sdbbm;
using testing::dawson_quadrature_oracle;
using testing::q_quadrature_oracle;

TEST_CASE("dawson_core frozen and oracle values") {
  CHECK(dawson_core(0.0) == 0.0);
  // frozen from the adaptive-quadrature oracle, cross-checked against the
  // derivative identity below
  CHECK(dawson_core(1.0) == doctest::Approx(0.538079506912768).epsilon(1e-12));

  for (double z : {1e-6, 1e-3, 0.1, 0.5, 1.0, 1.9, 2.0, 2.1, 3.0, 4.5, 6.0,
                   7.9, 8.0, 8.1, 12.0, 25.0}) {
    const double oracle = dawson_quadrature_oracle(z);
    CHECK(std::fabs(dawson_core(z) - oracle) <= 1e-12);
  }
}

TEST_CASE("dawson_core large-z asymptote z*D(z) -> 1/2") {
  // asymptotic series oracle: D(z) ~ 1/(2z) + 1/(4z^3)
  for (double z : {50.0, 200.0, 1e3, 1e6}) {
    const double asym = 1.0 / (2.0 * z) + 1.0 / (4.0 * z * z * z);
    CHECK(dawson_core(z) == doctest::Approx(asym).epsilon(1e-10));
    CHECK(std::fabs(z * dawson_core(z) - 0.5) <= 0.3 / (z * z) + 1e-12);
  }
}

TEST_CASE("derivative identity D' = 1 - 2 z D") {
  const double h = 1e-5;
  for (int i = 0; i < 20; ++i) {
    const double z = 0.05 + 0.45 * i;  // 0.05 .. 8.6 across all branches
    const double dnum = (dawson_core(z + h) - dawson_core(z - h)) / (2.0 * h);
    const double dref = 1.0 - 2.0 * z * dawson_core(z);
    CHECK(std::fabs(dnum - dref) <= 1e-8);
  }
}

TEST_CASE("q_function values and identity") {
  CHECK(q_function(0.0) == 0.0);
  CHECK(q_function(1.0) == doctest::Approx(1.076159).epsilon(1e-6));

  // identity Q(x) = 2 sqrt(x) D(sqrt(x)) on a log grid
  for (int i = 0; i < 100; ++i) {
    const double x = std::pow(10.0, -6.0 + 9.0 * i / 99.0);
    const double via_dawson = 2.0 * std::sqrt(x) * dawson_core(std::sqrt(x));
    CHECK(std::fabs(q_function(x) - via_dawson) <= 1e-10);
  }

  // direct quadrature of the singular defining integral
  for (int i = 0; i < 20; ++i) {
    const double x = std::pow(10.0, -3.0 + 4.5 * i / 19.0);  // up to ~30
    CHECK(std::fabs(q_function(x) - q_quadrature_oracle(x)) <= 1e-8);
  }
}

TEST_CASE("q_function bounds and limit") {
  double peak = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = std::pow(10.0, -6.0 + 9.0 * i / 400.0);
    const double q = q_function(x);
    CHECK(q >= 0.0);
    CHECK(q <= 1.3);
    peak = std::max(peak, q);
  }
  CHECK(peak == doctest::Approx(1.2847).epsilon(1e-3));  // max near x ~ 2.256
  CHECK(q_function(1e4) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(q_function(1e8) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(dawson_core(-1.0), std::domain_error);
  CHECK_THROWS_AS(dawson_core(std::numeric_limits<double>::quiet_NaN()),
                  std::domain_error);
  CHECK_THROWS_AS(dawson_core(std::numeric_limits<double>::infinity()),
                  std::domain_error);
  CHECK_THROWS_AS(q_function(-0.5), std::domain_error);
  CHECK_THROWS_AS(q_function(std::numeric_limits<double>::quiet_NaN()),
                  std::domain_error);
}
