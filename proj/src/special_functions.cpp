#include "sdbbm/special_functions.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace sdbbm {

namespace {

// Maclaurin series D(z) = sum_k (-1)^k 2^k z^{2k+1} / (2k+1)!!.
// Alternating with largest term ~ e^{z^2}/z, so usable only while the
// cancellation stays below the 1e-13 target; we cap at z < 2.
double dawson_series(double z) {
  const double z2 = z * z;
  double term = z;
  double sum = z;
  for (int k = 0; k < 200; ++k) {
    term *= -2.0 * z2 / static_cast<double>(2 * k + 3);
    sum += term;
    if (std::fabs(term) < 1e-18 * (1.0 + std::fabs(sum))) break;
  }
  return sum;
}

// 32-point Gauss-Legendre nodes/weights on [0,1], generated once by Newton
// iteration on P_32 (standard gauleg construction).
struct GaussRule {
  std::array<double, 32> node{};
  std::array<double, 32> weight{};
  GaussRule() {
    constexpr int n = 32;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (x * p0 - p1) / (x * x - 1.0);
        double dx = p0 / pp;
        x -= dx;
        if (std::fabs(dx) < 1e-16) break;
      }
      node[i] = 0.5 * (1.0 - x);
      node[n - 1 - i] = 0.5 * (1.0 + x);
      weight[i] = weight[n - 1 - i] = 1.0 / ((1.0 - x * x) * pp * pp);
    }
  }
};

// Composite Gauss-Legendre on [0,z] of e^{t^2 - z^2}, panels of width <= 1.
double dawson_quadrature(double z) {
  static const GaussRule rule;
  const int panels = static_cast<int>(std::ceil(z));
  const double width = z / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = p * width;
    double panel = 0.0;
    for (int i = 0; i < 32; ++i) {
      const double t = a + width * rule.node[i];
      panel += rule.weight[i] * std::exp(t * t - z * z);
    }
    sum += width * panel;
  }
  return sum;
}

// D(z) ~ sum_k (2k-1)!! / (2^{k+1} z^{2k+1}); truncated at the smallest term.
double dawson_asymptotic(double z) {
  const double inv2z2 = 1.0 / (2.0 * z * z);
  double term = 1.0 / (2.0 * z);
  double sum = term;
  for (int k = 1; k < 60; ++k) {
    const double next = term * (2.0 * k - 1.0) * inv2z2;
    if (next >= std::fabs(term)) break;
    term = next;
    sum += term;
    if (std::fabs(term) < 1e-18 * sum) break;
  }
  return sum;
}

void require_nonnegative_finite(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0)
    throw std::domain_error(std::string(what) +
                            " requires a finite nonnegative argument");
}

}  // namespace

double dawson_core(double z) {
  require_nonnegative_finite(z, "dawson_core");
  if (z == 0.0) return 0.0;
  if (z < 2.0) return dawson_series(z);
  if (z <= 8.0) return dawson_quadrature(z);
  return dawson_asymptotic(z);
}

double q_function(double x) {
  require_nonnegative_finite(x, "q_function");
  if (x == 0.0) return 0.0;
  const double root = std::sqrt(x);
  return 2.0 * root * dawson_core(root);
}

}  // namespace sdbbm
