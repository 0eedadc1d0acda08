#pragma once

#include <span>
#include <string>
#include <vector>

#include "sdbbm/limit_laws.hpp"
#include "sdbbm/particle_sim.hpp"

// Aggregates replicate outputs into empirical Laplace functionals and moments
// with uncertainty, and compares them against the solver-side limit values
// across a ladder of horizons T. Occupation values are normalized by the
// test-function mass throughout, so every comparison targets the limit
// process xi itself.

namespace sdbbm {

struct LaplaceEstimate {
  double estimate;   // in (0, 1]
  double stderror;   // > 0 for R >= 2, 0 for a single replicate
  std::size_t count;
};

// Sample mean of exp{-sum_k theta_k values[k]/mass} with its standard error.
// Throws ConfigError when a result's checkpoint count differs from the spec.
LaplaceEstimate estimate_laplace(std::span<const ReplicateResult> results,
                                 const LaplaceSpec& spec, double mass);

struct MomentRow {
  std::string name;
  double empirical;
  double theory;
  double z_score;        // (empirical - theory) / stderr
  bool asymptotic_only;  // theory holds only in the T -> infinity limit
};

// Mean rows (exact theory t_k at every T) and the variance row at the last
// checkpoint (limit theory 2 K t_n^2 / pi, flagged asymptotic). The variance
// row is omitted when K is not finite (degenerate regime).
std::vector<MomentRow> moment_experiment(std::span<const ReplicateResult> results,
                                         const LaplaceSpec& spec, double K,
                                         double mass);

struct ExperimentConfig {
  SigmaProfile sigma;
  TestFunction phi;
  LaplaceSpec spec;
  std::vector<double> T_ladder;
  std::size_t replicates = 100;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  SolverGrid grid{1.0, 1000};
};

struct HorizonResult {
  double T;
  LaplaceEstimate laplace;
  std::vector<double> empirical_means;  // per checkpoint, mass-normalized
  std::vector<double> mean_stderrors;
  std::vector<double> mean_z_scores;
  double variance_last;  // sample variance of values[n-1]/mass
  double gap_to_theory;  // |empirical laplace - theory laplace|
};

struct Verdict {
  std::string name;
  bool pass;
  double margin;  // distance inside (positive) or outside (negative) the gate
};

struct ExperimentReport {
  bool degenerate;        // sigma not integrable
  double theory_laplace;  // exp(log_laplace); 1.0 in the degenerate regime
  std::vector<double> theory_means;
  double theory_variance;  // 2 K t_n^2 / pi; unused when degenerate
  std::vector<HorizonResult> per_horizon;
  std::vector<Verdict> verdicts;
  bool all_pass() const;
};

// Runs run_replicates at every T (window and dt re-derived per T, replicate
// streams disjoint across rungs) and applies the gates:
//   mean-gate        exact mean within 3 stderr at every T and checkpoint;
//                    certifies window and dt adequacy before any asymptotic
//                    comparison is trusted
//   laplace-trend    non-degenerate: gap to theory non-increasing along the
//                    ladder; degenerate: estimate non-decreasing toward 1
//   laplace-final    non-degenerate: gap at the largest T <= 3 stderr + 0.02;
//                    degenerate: rise from smallest to largest T >= 3 pooled
//                    stderr
//   variance-gate    non-degenerate only: variance at the last checkpoint
//                    within 25% of 2 K t_n^2 / pi at the largest T
//   self-similar-solver     log_laplace((theta_n, t_n/2)) equals
//                           log_laplace((theta_n t_n/2, t_n... argument
//                           rescaled to the last time)) within 10 * grid step
//   self-similar-empirical  the paired empirical difference at the largest T
//                           within 3 stderr of zero
ExperimentReport ergodic_experiment(const ExperimentConfig& config);

}  // namespace sdbbm
