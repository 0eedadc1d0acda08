#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sdbbm/kernels.hpp"
#include "sdbbm/rng.hpp"

using namespace sdbbm;

namespace {

std::vector<double> random_vector(RngStream& rng, std::size_t n, double scale) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * (2.0 * rng.uniform01() - 1.0);
  return v;
}

}  // namespace

TEST_CASE("scalar reference semantics") {
  const std::vector<double> a{1.0, 2.0, 3.0};
  const std::vector<double> b{4.0, 5.0, 6.0};
  CHECK(kernels::scalar::dot(a.data(), b.data(), 3) == doctest::Approx(32.0));
  // dot_rev pairs a[k] with b[n-1-k]
  CHECK(kernels::scalar::dot_rev(a.data(), b.data(), 3) ==
        doctest::Approx(1 * 6 + 2 * 5 + 3 * 4));
  CHECK(kernels::scalar::sum_squares(a.data(), 3) == doctest::Approx(14.0));
  CHECK(kernels::scalar::max_abs_diff(a.data(), b.data(), 3) == doctest::Approx(3.0));
  CHECK(kernels::scalar::dot(a.data(), b.data(), 0) == 0.0);
  CHECK(kernels::scalar::dot_rev(a.data(), b.data(), 0) == 0.0);
}

TEST_CASE("dot_rev equals dot against a reversed copy") {
  RngStream rng(7);
  for (std::size_t n : {1u, 2u, 5u, 31u, 64u, 257u}) {
    auto a = random_vector(rng, n, 2.0);
    auto b = random_vector(rng, n, 2.0);
    std::vector<double> br(b.rbegin(), b.rend());
    const double lhs = kernels::scalar::dot_rev(a.data(), b.data(), n);
    const double rhs = kernels::scalar::dot(a.data(), br.data(), n);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
  }
}

#ifdef SDBBM_HAVE_AVX2_KERNELS
TEST_CASE("avx2 variants match the scalar reference") {
  if (kernels::active_backend() != "avx2") {
    MESSAGE("avx2 not available at runtime; dispatch test skipped");
    return;
  }
  RngStream rng(12345);
  for (std::size_t n = 0; n <= 70; ++n) {
    auto a = random_vector(rng, n, 3.0);
    auto b = random_vector(rng, n, 3.0);
    const double tol = 1e-13 * (1.0 + static_cast<double>(n));
    CHECK(kernels::avx2::dot(a.data(), b.data(), n) ==
          doctest::Approx(kernels::scalar::dot(a.data(), b.data(), n)).epsilon(tol));
    CHECK(kernels::avx2::dot_rev(a.data(), b.data(), n) ==
          doctest::Approx(kernels::scalar::dot_rev(a.data(), b.data(), n))
              .epsilon(tol));
    CHECK(kernels::avx2::sum_squares(a.data(), n) ==
          doctest::Approx(kernels::scalar::sum_squares(a.data(), n)).epsilon(tol));
    // max is order-independent, so equality is exact
    CHECK(kernels::avx2::max_abs_diff(a.data(), b.data(), n) ==
          kernels::scalar::max_abs_diff(a.data(), b.data(), n));
  }
  for (std::size_t n : {1000u, 4097u, 65536u}) {
    auto a = random_vector(rng, n, 1.0);
    auto b = random_vector(rng, n, 1.0);
    const double tol = 1e-10;  // accumulation-order slack at large n
    CHECK(kernels::avx2::dot(a.data(), b.data(), n) ==
          doctest::Approx(kernels::scalar::dot(a.data(), b.data(), n)).epsilon(tol));
    CHECK(kernels::avx2::dot_rev(a.data(), b.data(), n) ==
          doctest::Approx(kernels::scalar::dot_rev(a.data(), b.data(), n))
              .epsilon(tol));
  }
}
#endif

TEST_CASE("dispatched entry points agree with the reference") {
  RngStream rng(99);
  auto a = random_vector(rng, 513, 1.0);
  auto b = random_vector(rng, 513, 1.0);
  CHECK(kernels::dot(a.data(), b.data(), 513) ==
        doctest::Approx(kernels::scalar::dot(a.data(), b.data(), 513)).epsilon(1e-12));
  CHECK(kernels::dot_rev(a.data(), b.data(), 513) ==
        doctest::Approx(kernels::scalar::dot_rev(a.data(), b.data(), 513))
            .epsilon(1e-12));
  CHECK(kernels::sum_squares(a.data(), 513) ==
        doctest::Approx(kernels::scalar::sum_squares(a.data(), 513)).epsilon(1e-12));
  CHECK(kernels::max_abs_diff(a.data(), b.data(), 513) ==
        kernels::scalar::max_abs_diff(a.data(), b.data(), 513));
  MESSAGE("active backend: ", kernels::active_backend());
}
