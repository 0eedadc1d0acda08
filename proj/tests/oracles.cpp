#include "oracles.hpp"

#include <cmath>

namespace sdbbm::testing {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double recurse(const std::function<double(double)>& f, double a, double fa,
               double b, double fb, double m, double fm, double whole,
               double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson(a, fa, b, fb, fm);
  return recurse(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double dawson_quadrature_oracle(double z, double tol) {
  if (z == 0.0) return 0.0;
  return adaptive_simpson([z](double t) { return std::exp(t * t - z * z); }, 0.0,
                          z, tol);
}

double q_quadrature_oracle(double x, double tol) {
  if (x == 0.0) return 0.0;
  const double eps = std::min(x, 0.25);
  // int_0^eps e^y y^{-1/2} dy = sum_n eps^{n+1/2} / (n! (n + 1/2))
  double series = 0.0;
  double pow_term = std::sqrt(eps);  // eps^{n+1/2} / n!
  for (int n = 0; n < 60; ++n) {
    const double add = pow_term / (n + 0.5);
    series += add;
    if (add < 1e-17 * series) break;
    pow_term *= eps / (n + 1.0);
  }
  // both pieces scaled by e^{-x} inside the integrand to avoid overflow
  double total = series * std::exp(-x);
  if (x > eps) {
    total += adaptive_simpson(
        [x](double y) { return std::exp(y - x) / std::sqrt(y); }, eps, x, tol);
  }
  return std::sqrt(x) * total;
}

double forcing_quadrature_oracle(const LaplaceSpec& spec, double s) {
  if (s == 0.0) return 0.0;
  const double inv = 1.0 / std::sqrt(2.0 * M_PI);
  auto indicator = [&](double u) {
    double total = 0.0;
    for (const auto& [theta, t] : spec.pairs())
      if (1.0 - u <= t) total += theta;
    return total;
  };
  // exact kernel tail on [s - tail, s]: the indicator is constant there as
  // long as no jump point 1 - t_k falls inside, which `tail` guarantees for
  // the specs used in tests
  double tail = 1e-10;
  for (const auto& [theta, t] : spec.pairs()) {
    const double jump = 1.0 - t;
    if (jump < s && s - jump < tail) tail = 0.5 * (s - jump);
  }
  const double body = adaptive_simpson(
      [&](double u) { return indicator(u) / std::sqrt(s - u); }, 0.0, s - tail,
      1e-11, 60);
  const double tail_part = indicator(s) * 2.0 * std::sqrt(tail);
  return inv * (body + tail_part);
}

}  // namespace sdbbm::testing
