#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdbbm/rng.hpp"

// Exact-law Monte Carlo for the site-dependent branching Brownian motion:
// particles start from a Poisson field with unit intensity on [-L, L], move
// as Brownian motions, and branch at rate gamma with offspring 0/1/2 drawn
// with probabilities sigma(x), 1 - 2 sigma(x), sigma(x) at the branch site.
// Branching times and displacements are exact; the only discretization is
// the occupation quadrature step dt, and the only truncation is the initial
// window [-L, L] sized so the bias sits far below Monte Carlo noise.

namespace sdbbm {

class SigmaProfile {
 public:
  enum class Kind { constant, indicator_window, gaussian_bump, table };

  static SigmaProfile constant(double level, double gamma);
  static SigmaProfile indicator_window(double level, double center,
                                       double halfwidth, double gamma);
  static SigmaProfile gaussian_bump(double amplitude, double width, double gamma);
  static SigmaProfile table(double x0, double dx, std::vector<double> values,
                            double gamma);

  double operator()(double x) const;
  Kind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  // integral of sigma over R; +infinity for a nonzero constant profile
  double sigma_integral() const { return integral_; }
  bool integrable() const;
  // K = gamma * integral (may be +infinity)
  double K() const;

 private:
  SigmaProfile() = default;
  Kind kind_ = Kind::constant;
  double gamma_ = 0.0;
  double integral_ = 0.0;
  double p0_ = 0.0, p1_ = 0.0, p2_ = 0.0;  // kind parameters
  std::vector<double> table_;
};

class TestFunction {
 public:
  enum class Kind { gaussian_bump, raised_cosine, table };

  static TestFunction gaussian_bump(double amplitude, double width);
  static TestFunction raised_cosine(double amplitude, double radius);
  static TestFunction table(double x0, double dx, std::vector<double> values);

  // evaluates as exactly zero beyond support_radius()
  double operator()(double x) const;
  Kind kind() const { return kind_; }
  double mass() const { return mass_; }
  double support_radius() const { return support_; }

 private:
  TestFunction() = default;
  Kind kind_ = Kind::gaussian_bump;
  double mass_ = 0.0;
  double support_ = 0.0;
  double p0_ = 0.0, p1_ = 0.0, p2_ = 0.0;
  std::vector<double> table_;
};

struct SimConfig {
  double T;
  std::vector<double> checkpoints;  // increasing, in (0, 1]
  double window_halfwidth;          // L
  double dt;
  SigmaProfile sigma;
  TestFunction phi;
  std::uint64_t seed = 0;
  // base replicate index: run_replicates drives replicate i with the stream
  // for (seed, replicate_index + i), so disjoint ranges give disjoint samples
  std::uint64_t replicate_index = 0;
  std::int64_t population_cap = 1'000'000;

  // dt = min(0.05, T/2000), L = support_radius + 8 sqrt(T)
  static SimConfig derive(double T, std::vector<double> checkpoints,
                          SigmaProfile sigma, TestFunction phi,
                          std::uint64_t seed);
  void validate() const;
};

struct ReplicateResult {
  std::vector<double> values;  // <X_T(t_k), phi>, nonnegative, non-decreasing
  std::int64_t peak_population;
  std::int64_t branch_events;
};

struct BlowUpError : std::runtime_error {
  BlowUpError(std::int64_t population_, std::int64_t replicate_)
      : std::runtime_error("population cap exceeded (population " +
                           std::to_string(population_) + ", replicate " +
                           std::to_string(replicate_) + ")"),
        population(population_),
        replicate(replicate_) {}
  std::int64_t population;
  std::int64_t replicate;
};

// Poisson(2L) particles placed uniformly on [-L, L].
std::vector<double> init_poisson_field(double L, RngStream& rng);

// 0 if u < sigma, 2 if u >= 1 - sigma, else 1; mean offspring is exactly 1.
int branch_outcome(double sigma_at_x, double u);

ReplicateResult simulate_replicate(const SimConfig& config, RngStream& rng);

// R independent replicates; replicate i uses RngStream::for_replicate(seed, i).
// Results are index-ordered regardless of thread schedule. threads == 0
// selects hardware concurrency.
std::vector<ReplicateResult> run_replicates(const SimConfig& config,
                                            std::size_t R, unsigned threads = 1);

}  // namespace sdbbm
