#include "sdbbm/fractional_volterra.hpp"

#include <algorithm>
#include <cmath>

#include "sdbbm/kernels.hpp"

namespace sdbbm {

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * M_PI);

// Kernel moments over one subinterval of width dt at integer lag l >= 1
// (integration variable measured from the evaluation point):
//   M0(l) = int (s_i - u)^{-1/2} du   over [s_i - l dt, s_i - (l-1) dt]
//   M1(l) = int (u - left) (s_i - u)^{-1/2} du over the same subinterval.
// Stable forms avoid the cancellation in sqrt(l) - sqrt(l-1) at large lag.
double moment0(double lag, double dt) {
  const double root = std::sqrt(dt);
  return 2.0 * root / (std::sqrt(lag) + std::sqrt(lag - 1.0));
}

double moment1(double lag, double dt) {
  const double sl = std::sqrt(lag);
  const double sl1 = std::sqrt(lag - 1.0);
  const double d12 = 1.0 / (sl + sl1);                        // sqrt diff
  const double d32 = (lag + sl * sl1 + (lag - 1.0)) * d12;    // l^{3/2} diff
  return dt * std::sqrt(dt) * (2.0 * lag * d12 - (2.0 / 3.0) * d32);
}

// Per-lag node weights of the product-integration rules, premultiplied by
// 1/sqrt(2 pi). For a grid value array g:
//
//   full (piecewise linear everywhere, half_fractional_integral):
//     J(g)(s_i) = sum_{r=0}^{i-1} mid[r] g[i-r] + left[i] g[0]
//
//   history (marching: linear on [0, s_{i-1}], node i excluded):
//     H(g)(s_i) = sum_{r=1}^{i-1} hist[r] g[i-r] + left[i] g[0]
//
// and the marching diagonal applies diag_rect = sqrt(2 dt / pi) to g[i].
struct AbelWeights {
  std::vector<double> mid;
  std::vector<double> hist;
  std::vector<double> left;
  double diag_rect;

  AbelWeights(std::size_t m, double dt) {
    std::vector<double> m0(m + 2), m1(m + 2);
    for (std::size_t l = 1; l <= m + 1; ++l) {
      m0[l] = moment0(static_cast<double>(l), dt);
      m1[l] = moment1(static_cast<double>(l), dt);
    }
    mid.assign(m + 1, 0.0);
    hist.assign(m + 1, 0.0);
    left.assign(m + 1, 0.0);
    mid[0] = m1[1] / dt / kSqrt2Pi;
    for (std::size_t r = 1; r <= m; ++r) {
      const double right_part = m1[r + 1] / dt;
      const double left_part = m0[r] - m1[r] / dt;
      mid[r] = (left_part + right_part) / kSqrt2Pi;
      hist[r] = r == 1 ? right_part / kSqrt2Pi : mid[r];
    }
    for (std::size_t i = 1; i <= m; ++i)
      left[i] = (m0[i] - m1[i] / dt) / kSqrt2Pi;
    diag_rect = std::sqrt(2.0 * dt / M_PI);
  }
};

double forcing_closed_form(const LaplaceSpec& spec, double s) {
  double total = 0.0;
  for (const auto& [theta, t] : spec.pairs()) {
    const double arg = s - (1.0 - t);
    if (arg > 0.0) total += theta * std::sqrt(2.0 * arg / M_PI);
  }
  return total;
}

// Shared marching core. `forcing` must already be tabulated on the grid.
std::vector<double> march(std::span<const double> forcing, double K,
                          const SolverGrid& grid) {
  const std::size_t m = grid.m;
  const double dt = grid.step();
  const AbelWeights w(m, dt);
  std::vector<double> y(m + 1, 0.0);
  std::vector<double> g(m + 1, 0.0);  // y^2
  const double kw = K * w.diag_rect;
  for (std::size_t i = 1; i <= m; ++i) {
    double hist = 0.0;
    if (i >= 2) {
      hist = kernels::dot_rev(w.hist.data() + 1, g.data() + 1, i - 1) +
             w.left[i] * g[0];
    }
    const double rhs = forcing[i] - K * hist;
    double yi;
    if (kw > 0.0) {
      const double disc = 1.0 + 4.0 * kw * rhs;
      if (disc < 0.0)
        throw SolverFailure("marching step has no real root; grid too coarse");
      yi = (-1.0 + std::sqrt(disc)) / (2.0 * kw);
    } else {
      yi = rhs;
    }
    if (yi < 0.0) yi = 0.0;  // true solution is nonnegative; error is O(dt)
    y[i] = yi;
    g[i] = yi * yi;
  }
  return y;
}

std::vector<double> tabulate_forcing(const LaplaceSpec& spec,
                                     const SolverGrid& grid) {
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    f[i] = forcing_closed_form(spec, grid.point(i));
  return f;
}

}  // namespace

LaplaceSpec::LaplaceSpec(std::vector<ThetaTime> pairs) : pairs_(std::move(pairs)) {
  if (pairs_.empty())
    throw std::invalid_argument("LaplaceSpec needs at least one (theta, t) pair");
  double prev = -1.0;
  for (const auto& [theta, t] : pairs_) {
    if (!(theta >= 0.0) || !std::isfinite(theta))
      throw std::invalid_argument("LaplaceSpec: theta must be finite and >= 0");
    if (!(t >= 0.0) || !(t <= 1.0))
      throw std::invalid_argument("LaplaceSpec: times must lie in [0, 1]");
    if (!(t > prev))
      throw std::invalid_argument("LaplaceSpec: times must be strictly increasing");
    prev = t;
  }
}

LaplaceSpec LaplaceSpec::single(double theta, double time) {
  return LaplaceSpec({{theta, time}});
}

double LaplaceSpec::theta_time_sum() const {
  double s = 0.0;
  for (const auto& [theta, t] : pairs_) s += theta * t;
  return s;
}

bool LaplaceSpec::all_zero() const {
  return std::all_of(pairs_.begin(), pairs_.end(),
                     [](const ThetaTime& p) { return p.theta == 0.0; });
}

SolverGrid::SolverGrid(double S_, std::size_t m_) : S(S_), m(m_) {
  if (!(S > 0.0) || !std::isfinite(S))
    throw std::invalid_argument("SolverGrid: S must be finite and positive");
  if (m < 2) throw std::invalid_argument("SolverGrid: need at least 2 steps");
}

double forcing_term(const LaplaceSpec& spec, double s) {
  if (!(s >= 0.0) || !(s <= 1.0))
    throw std::domain_error("forcing_term: s must lie in [0, 1]");
  return forcing_closed_form(spec, s);
}

std::vector<double> half_fractional_integral(std::span<const double> f,
                                             const SolverGrid& grid) {
  if (f.size() != grid.size())
    throw std::invalid_argument("half_fractional_integral: size mismatch");
  const AbelWeights w(grid.m, grid.step());
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 1; i <= grid.m; ++i) {
    out[i] = kernels::dot_rev(w.mid.data(), f.data() + 1, i) + w.left[i] * f[0];
  }
  return out;
}

LambdaGrid solve_lambda(const LaplaceSpec& spec, double K,
                        const SolverGrid& grid) {
  if (std::fabs(grid.S - 1.0) > 1e-12)
    throw std::invalid_argument("solve_lambda: grid must cover [0, 1]");
  if (!(K >= 0.0) || !std::isfinite(K))
    throw std::invalid_argument("solve_lambda: K must be finite and >= 0");
  auto f = tabulate_forcing(spec, grid);
  auto y = march(f, K, grid);
  return {grid, std::move(y), K, spec};
}

LambdaGrid solve_lambda_extended(double theta, double K,
                                 const SolverGrid& grid) {
  if (!(theta >= 0.0) || !std::isfinite(theta))
    throw std::invalid_argument("solve_lambda_extended: theta must be >= 0");
  if (!(K > 0.0) || !std::isfinite(K))
    throw std::invalid_argument("solve_lambda_extended: K must be positive");
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    f[i] = theta * std::sqrt(2.0 * grid.point(i) / M_PI);
  auto y = march(f, K, grid);
  return {grid, std::move(y), K, LaplaceSpec::single(theta)};
}

PicardResult picard_solve(const LaplaceSpec& spec, double K,
                          const SolverGrid& grid, PicardOptions opts) {
  if (opts.max_iter < 1)
    throw std::invalid_argument("picard_solve: max_iter must be >= 1");
  if (!(opts.tol > 0.0))
    throw std::invalid_argument("picard_solve: tol must be positive");
  auto f = tabulate_forcing(spec, grid);
  const std::size_t n = grid.size();
  std::vector<double> y(n, 0.0), g(n), next(n);
  double change = 0.0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) g[i] = y[i] * y[i];
    auto J = half_fractional_integral(g, grid);
    for (std::size_t i = 0; i < n; ++i)
      next[i] = std::max(0.0, f[i] - K * J[i]);
    change = kernels::max_abs_diff(next.data(), y.data(), n);
    y.swap(next);
    if (change <= opts.tol)
      return {LambdaGrid{grid, std::move(y), K, spec}, it, change};
  }
  throw IterationLimit("picard_solve: no convergence within max_iter", change);
}

double equation_residual(const LambdaGrid& lambda, int refine) {
  if (refine < 1) throw std::invalid_argument("equation_residual: refine >= 1");
  const std::size_t m = lambda.grid.m;
  const std::size_t rm = m * static_cast<std::size_t>(refine);
  const SolverGrid fine(lambda.grid.S, rm);
  // linear interpolation of y onto the finer grid, then square
  std::vector<double> g(rm + 1);
  for (std::size_t j = 0; j <= rm; ++j) {
    const std::size_t q = j / refine;
    const std::size_t r = j % refine;
    double v;
    if (r == 0) {
      v = lambda.values[q];
    } else {
      const double w = static_cast<double>(r) / refine;
      v = (1.0 - w) * lambda.values[q] + w * lambda.values[q + 1];
    }
    g[j] = v * v;
  }
  auto J = half_fractional_integral(g, fine);
  double worst = 0.0;
  for (std::size_t i = 0; i <= m; ++i) {
    const double s = lambda.grid.point(i);
    const double f = forcing_closed_form(lambda.spec, s);
    const double res =
        lambda.values[i] - f + lambda.K * J[i * static_cast<std::size_t>(refine)];
    worst = std::max(worst, std::fabs(res));
  }
  return worst;
}

}  // namespace sdbbm
