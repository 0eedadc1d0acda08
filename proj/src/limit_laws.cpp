#include "sdbbm/limit_laws.hpp"

#include <algorithm>
#include <cmath>

#include "sdbbm/kernels.hpp"

namespace sdbbm {

namespace {

// Trapezoid of values^2 over grid cells [i0, i1].
double trapezoid_square(const LambdaGrid& lambda, std::size_t i0, std::size_t i1) {
  const double dt = lambda.grid.step();
  const double* v = lambda.values.data();
  const std::size_t n = i1 - i0 + 1;
  double total = kernels::sum_squares(v + i0, n);
  total -= 0.5 * (v[i0] * v[i0] + v[i1] * v[i1]);
  return total * dt;
}

// Cumulative trapezoid of h^2, evaluated at arbitrary s by interpolating the
// cumulative integral (exact at grid points, O(dt^2) between).
class SquareIntegral {
 public:
  explicit SquareIntegral(const LambdaGrid& lambda)
      : dt_(lambda.grid.step()), cum_(lambda.values.size(), 0.0) {
    const auto& v = lambda.values;
    for (std::size_t i = 1; i < v.size(); ++i)
      cum_[i] = cum_[i - 1] + 0.5 * dt_ * (v[i] * v[i] + v[i - 1] * v[i - 1]);
  }

  double upper_limit() const { return dt_ * static_cast<double>(cum_.size() - 1); }

  double at(double s) const {
    const double pos = s / dt_;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= cum_.size()) return cum_.back();
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * cum_[i] + w * cum_[i + 1];
  }

 private:
  double dt_;
  std::vector<double> cum_;
};

double slope_from_first_cells(const LambdaGrid& lambda) {
  const double dt = lambda.grid.step();
  const double h1 = lambda.values[1];
  const double h2 = lambda.values[2];
  return (h2 * h2 - h1 * h1) / (2.0 * dt);
}

}  // namespace

double log_laplace(const LaplaceSpec& spec, double K, const SolverGrid& grid,
                   LambdaIntegralRange range) {
  const LambdaGrid lambda = solve_lambda(spec, K, grid);
  std::size_t i0 = 0;
  if (range == LambdaIntegralRange::from_first_active) {
    const double start = 1.0 - spec.last_time();
    i0 = static_cast<std::size_t>(std::floor(start / grid.step()));
    i0 = std::min(i0, grid.m - 1);
  }
  const double integral = trapezoid_square(lambda, i0, grid.m);
  const double value = K * integral - spec.theta_time_sum();
  return std::min(value, 0.0);
}

LimitLawReport limit_law_report(const LaplaceSpec& spec, double K,
                                const SolverGrid& grid) {
  LimitLawReport report{spec, K, log_laplace(spec, K, grid), {}, {}};
  for (const auto& [theta, t] : spec.pairs()) {
    auto [mean, variance] = xi_cumulants(K > 0.0 ? K : 0.0, t);
    report.mean_vector.push_back(mean);
    report.covariance_diag.push_back(variance);
  }
  return report;
}

std::pair<double, double> xi_cumulants(double K, double t) {
  if (!(K >= 0.0) || !std::isfinite(K))
    throw std::invalid_argument("xi_cumulants: K must be finite and >= 0");
  if (!(t >= 0.0) || !(t <= 1.0))
    throw std::invalid_argument("xi_cumulants: t must lie in [0, 1]");
  return {t, 2.0 * K * t * t / M_PI};
}

double small_s_slope_check(double K, const SolverGrid& grid, double theta) {
  if (!(K > 0.0)) throw std::invalid_argument("small_s_slope_check: K > 0");
  if (grid.step() * 10.0 > 0.01)
    throw ConfigError("small_s_slope_check: fewer than 10 grid points below 0.01");
  if (theta == 0.0) return 0.0;  // degenerate: h is identically zero
  const LambdaGrid lambda = solve_lambda_extended(theta, K, grid);
  return slope_from_first_cells(lambda);
}

LevyMomentReport complete_monotonicity_probe(double K,
                                             std::span<const double> theta_grid,
                                             int max_order,
                                             const SolverGrid& grid,
                                             double eps) {
  if (max_order < 1 || max_order > 4)
    throw std::invalid_argument("complete_monotonicity_probe: max_order in [1, 4]");
  if (theta_grid.size() < static_cast<std::size_t>(max_order) + 1)
    throw std::invalid_argument("complete_monotonicity_probe: theta grid too short");
  const double spacing = theta_grid[1] - theta_grid[0];
  for (std::size_t i = 0; i + 1 < theta_grid.size(); ++i) {
    if (!(theta_grid[i] > 0.0))
      throw std::invalid_argument("complete_monotonicity_probe: thetas must be positive");
    if (std::fabs(theta_grid[i + 1] - theta_grid[i] - spacing) > 1e-9 * spacing)
      throw std::invalid_argument("complete_monotonicity_probe: theta grid must be uniform");
  }
  if (theta_grid.back() > grid.S)
    throw ConfigError("complete_monotonicity_probe: solver grid does not cover theta range");
  if (eps < 0.0) eps = 1e-6 + 10.0 * grid.step();

  const LambdaGrid lambda = solve_lambda_extended(1.0, K, grid);
  const auto h_at = [&](double s) {
    const double pos = s / grid.step();
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= lambda.values.size()) return lambda.values.back();
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * lambda.values[i] + w * lambda.values[i + 1];
  };

  std::vector<double> diff(theta_grid.size());
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    const double h = h_at(theta_grid[i]);
    diff[i] = 1.0 - K * h * h;  // g(theta), Laplace transform of x nu(dx)
  }

  bool ok = true;
  double sign = 1.0;
  for (int order = 1; order <= max_order; ++order) {
    for (std::size_t i = 0; i + 1 < diff.size(); ++i) diff[i] = diff[i + 1] - diff[i];
    diff.pop_back();
    sign = -sign;
    for (double d : diff) {
      if (sign * d < -eps) {
        ok = false;
        break;
      }
    }
    if (!ok) break;
  }

  // g(0+) = 1 by Richardson extrapolation from the first cells; the second
  // moment is 2K lim h h' = 2K/pi via the slope estimate.
  const double g1 = 1.0 - K * lambda.values[1] * lambda.values[1];
  const double g2 = 1.0 - K * lambda.values[2] * lambda.values[2];
  const double first_moment = 2.0 * g1 - g2;
  const double second_moment = 2.0 * K * slope_from_first_cells(lambda);
  return {K, first_moment, second_moment, max_order, ok};
}

std::vector<std::pair<double, double>> degenerate_limit_curve(
    double theta, std::span<const double> K_list, const SolverGrid& grid) {
  if (!(theta > 0.0))
    throw std::invalid_argument("degenerate_limit_curve: theta must be positive");
  if (K_list.empty())
    throw std::invalid_argument("degenerate_limit_curve: empty K list");
  double prev = 0.0;
  for (double K : K_list) {
    if (!(K > prev))
      throw std::invalid_argument("degenerate_limit_curve: K list must be increasing and positive");
    prev = K;
  }
  if (K_list.back() * theta > grid.S)
    throw ConfigError("degenerate_limit_curve: extended-solve range insufficient");

  const LambdaGrid h = solve_lambda_extended(1.0, 1.0, grid);
  const SquareIntegral integral(h);
  std::vector<std::pair<double, double>> curve;
  curve.reserve(K_list.size());
  for (double K : K_list) curve.emplace_back(K, integral.at(K * theta) / K);
  return curve;
}

}  // namespace sdbbm
