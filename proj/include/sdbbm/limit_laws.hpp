#pragma once

#include <span>
#include <utility>
#include <vector>

#include "sdbbm/fractional_volterra.hpp"

// Laws of the occupation-time limit process xi: log-Laplace functionals of
// its finite-dimensional distributions, the first two cumulants, and the
// numerically testable consequences of the Levy-measure representation
// (the Levy measure itself is never materialized; everything goes through
// Lambda).

namespace sdbbm {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Integration range of K * int Lambda^2 ds in the log-Laplace exponent.
// Both coincide because Lambda vanishes below 1 - t_n; keeping the choice
// explicit lets tests assert the equality rather than assume it.
enum class LambdaIntegralRange { from_first_active, full };

// log E exp{-sum theta_k xi(t_k)} = K int Lambda^2 ds - sum t_k theta_k (<= 0)
double log_laplace(const LaplaceSpec& spec, double K, const SolverGrid& grid,
                   LambdaIntegralRange range = LambdaIntegralRange::from_first_active);

struct LimitLawReport {
  LaplaceSpec spec;
  double K;
  double log_laplace;
  std::vector<double> mean_vector;      // E xi(t_k) = t_k
  std::vector<double> covariance_diag;  // Var xi(t_k) = 2 K t_k^2 / pi
};

LimitLawReport limit_law_report(const LaplaceSpec& spec, double K,
                                const SolverGrid& grid);

// First two cumulants of xi(t): (t, 2 K t^2 / pi).
std::pair<double, double> xi_cumulants(double K, double t);

// Finite-difference estimate of lim_{s->0} h(s) h'(s) (= 1/pi) from the
// smallest grid cells of the extended solve, via (h^2(s2)-h^2(s1))/(2(s2-s1)).
// theta == 0 returns exactly 0 (degenerate input). Requires at least 10 grid
// points below s = 0.01.
double small_s_slope_check(double K, const SolverGrid& grid, double theta = 1.0);

struct LevyMomentReport {
  double K;
  double first_moment;   // target 1
  double second_moment;  // target 2 K / pi
  int monotonicity_orders_checked;
  bool alternation_ok;
};

// Probes complete monotonicity of g(theta) = 1 - K h(theta)^2, the Laplace
// transform of x nu(dx): checks (-1)^j D^j g >= -eps for finite differences
// up to max_order on the uniform theta grid, and extracts the two moments.
// eps < 0 selects the default 1e-6 + 10 * grid step.
LevyMomentReport complete_monotonicity_probe(double K,
                                             std::span<const double> theta_grid,
                                             int max_order,
                                             const SolverGrid& grid,
                                             double eps = -1.0);

// For each K in K_list: (1/K) int_0^{K theta} h^2(s, 1) ds with h the K = 1
// normalized extended solution; the values rise toward theta as K grows.
std::vector<std::pair<double, double>> degenerate_limit_curve(
    double theta, std::span<const double> K_list, const SolverGrid& grid);

}  // namespace sdbbm
