#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

// Nonlinear Volterra equations with the Abel kernel 1/sqrt(2 pi (s-u)):
//
//   y(s) = f(s) - K * J(y^2)(s),   J(g)(s) = int_0^s g(u) / sqrt(2 pi (s-u)) du
//
// where the forcing f encodes a multi-time Laplace spec on [0,1] or the
// single-theta form sqrt(2s/pi) * theta on an arbitrary interval [0,S].
// The unique nonnegative solution Lambda is non-decreasing for single-theta
// specs, bounded by sqrt(theta/K), and vanishes on [0, 1 - t_n).
//
// Discretization: uniform grid, product integration with exact kernel moments
// per subinterval. The history uses a piecewise-linear density; the newest
// subinterval carries the unknown through the rectangle weight sqrt(2 dt/pi),
// so each step reduces to one scalar quadratic solved in closed form (always
// the nonnegative root). Negative right-hand sides, which can occur
// transiently next to the forcing kinks at s = 1 - t_k, clamp to zero.
//
// picard_solve is the independent route: fixed-point iteration through the
// fully piecewise-linear half-fractional integral, used as an oracle against
// the marching scheme.

namespace sdbbm {

struct ThetaTime {
  double theta;
  double time;
};

// Evaluation points {(theta_k, t_k)}, n >= 1, 0 <= t_1 < ... < t_n <= 1,
// theta_k >= 0. Throws std::invalid_argument on violation.
class LaplaceSpec {
 public:
  explicit LaplaceSpec(std::vector<ThetaTime> pairs);
  static LaplaceSpec single(double theta, double time = 1.0);

  const std::vector<ThetaTime>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  double last_time() const { return pairs_.back().time; }
  // sum_k t_k theta_k
  double theta_time_sum() const;
  bool all_zero() const;

 private:
  std::vector<ThetaTime> pairs_;
};

// Uniform grid s_i = i * (S/m), i = 0..m. m >= 2.
struct SolverGrid {
  double S;
  std::size_t m;

  SolverGrid(double S_, std::size_t m_);
  double step() const { return S / static_cast<double>(m); }
  double point(std::size_t i) const { return S * static_cast<double>(i) / static_cast<double>(m); }
  std::size_t size() const { return m + 1; }
};

struct LambdaGrid {
  SolverGrid grid;
  std::vector<double> values;  // m + 1 entries, all >= 0
  double K;
  LaplaceSpec spec;
};

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IterationLimit : std::runtime_error {
  IterationLimit(const std::string& msg, double residual)
      : std::runtime_error(msg), last_residual(residual) {}
  double last_residual;
};

// Closed form of sum_k theta_k int_0^s 1_{[0,t_k]}(1-u)/sqrt(2 pi (s-u)) du,
// i.e. sum_k theta_k sqrt(2 max(0, s - (1 - t_k)) / pi). Domain: s in [0,1].
double forcing_term(const LaplaceSpec& spec, double s);

// Piecewise-linear product integration of J(f) at every grid point.
// Exact for constant and linear f; J(f)(0) = 0 exactly.
std::vector<double> half_fractional_integral(std::span<const double> f,
                                             const SolverGrid& grid);

// Marching solve of the multi-time equation on [0,1]; grid.S must be 1.
LambdaGrid solve_lambda(const LaplaceSpec& spec, double K, const SolverGrid& grid);

// Marching solve of y = sqrt(2s/pi) theta - K J(y^2) on [0,S], K > 0.
LambdaGrid solve_lambda_extended(double theta, double K, const SolverGrid& grid);

struct PicardOptions {
  int max_iter = 500;
  double tol = 1e-12;
};

struct PicardResult {
  LambdaGrid lambda;
  int iterations;
  double final_change;
};

PicardResult picard_solve(const LaplaceSpec& spec, double K,
                          const SolverGrid& grid, PicardOptions opts = {});

// Sup-norm of y - f + K J(y^2) with the half-fractional integral evaluated on
// a `refine`-times finer grid (values interpolated linearly).
double equation_residual(const LambdaGrid& lambda, int refine = 4);

}  // namespace sdbbm
