#include "sdbbm/experiment_harness.hpp"

#include <algorithm>
#include <cmath>

namespace sdbbm {

namespace {

struct MeanStd {
  double mean;
  double stderror;
};

MeanStd mean_and_stderr(std::span<const double> xs) {
  const auto n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

double sample_variance(std::span<const double> xs) {
  const auto n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / (n - 1.0);
}

void check_shapes(std::span<const ReplicateResult> results,
                  std::size_t expected) {
  for (const auto& r : results)
    if (r.values.size() != expected)
      throw ConfigError("replicate checkpoint count does not match the spec");
}

}  // namespace

LaplaceEstimate estimate_laplace(std::span<const ReplicateResult> results,
                                 const LaplaceSpec& spec, double mass) {
  if (results.empty())
    throw std::invalid_argument("estimate_laplace: need at least one replicate");
  if (!(mass > 0.0))
    throw std::invalid_argument("estimate_laplace: mass must be positive");
  check_shapes(results, spec.size());
  std::vector<double> ws(results.size());
  for (std::size_t r = 0; r < results.size(); ++r) {
    double expo = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k)
      expo += spec.pairs()[k].theta * results[r].values[k] / mass;
    ws[r] = std::exp(-expo);
  }
  auto [mean, se] = mean_and_stderr(ws);
  return {mean, se, results.size()};
}

std::vector<MomentRow> moment_experiment(std::span<const ReplicateResult> results,
                                         const LaplaceSpec& spec, double K,
                                         double mass) {
  if (results.size() < 30)
    throw std::invalid_argument("moment_experiment: need at least 30 replicates");
  if (!(mass > 0.0))
    throw std::invalid_argument("moment_experiment: mass must be positive");
  check_shapes(results, spec.size());

  std::vector<MomentRow> rows;
  std::vector<double> column(results.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    for (std::size_t r = 0; r < results.size(); ++r)
      column[r] = results[r].values[k] / mass;
    auto [mean, se] = mean_and_stderr(column);
    const double t = spec.pairs()[k].time;
    rows.push_back({"mean@t=" + std::to_string(t), mean, t,
                    se > 0.0 ? (mean - t) / se : 0.0, false});
  }

  if (std::isfinite(K)) {
    const std::size_t last = spec.size() - 1;
    for (std::size_t r = 0; r < results.size(); ++r)
      column[r] = results[r].values[last] / mass;
    const double var = sample_variance(column);
    const double t = spec.pairs()[last].time;
    const double theory = 2.0 * K * t * t / M_PI;
    // delta-method stderr of the sample variance
    double mean = 0.0;
    for (double x : column) mean += x;
    mean /= static_cast<double>(column.size());
    double m4 = 0.0;
    for (double x : column) {
      const double d = x - mean;
      m4 += d * d * d * d;
    }
    m4 /= static_cast<double>(column.size());
    const double se_var =
        std::sqrt(std::max(0.0, m4 - var * var) / static_cast<double>(column.size()));
    rows.push_back({"variance@t=" + std::to_string(t), var, theory,
                    se_var > 0.0 ? (var - theory) / se_var : 0.0, true});
  }
  return rows;
}

bool ExperimentReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const Verdict& v) { return v.pass; });
}

ExperimentReport ergodic_experiment(const ExperimentConfig& config) {
  if (config.T_ladder.empty())
    throw std::invalid_argument("ergodic_experiment: empty T ladder");
  for (std::size_t i = 1; i < config.T_ladder.size(); ++i)
    if (!(config.T_ladder[i] > config.T_ladder[i - 1]))
      throw std::invalid_argument("ergodic_experiment: T ladder must increase");
  if (config.replicates < 2)
    throw std::invalid_argument("ergodic_experiment: need at least 2 replicates");

  const double mass = config.phi.mass();
  const double K = config.sigma.K();
  const bool degenerate = !config.sigma.integrable() && config.sigma.gamma() > 0.0;

  ExperimentReport report;
  report.degenerate = degenerate;

  // theory side
  const auto& pairs = config.spec.pairs();
  const double theta_n = pairs.back().theta;
  const double t_n = pairs.back().time;
  if (degenerate) {
    report.theory_laplace = 1.0;  // X_T -> 0 in f.d.d.
    report.theory_variance = 0.0;
  } else {
    report.theory_laplace = std::exp(log_laplace(config.spec, K, config.grid));
    report.theory_variance = xi_cumulants(K, t_n).second;
  }
  for (const auto& p : pairs) report.theory_means.push_back(p.time);

  // simulation checkpoints: spec times plus t_n/2 for the self-similarity
  // comparison (skipped if already present)
  const double t_half = t_n / 2.0;
  std::vector<double> sim_times;
  std::vector<std::size_t> spec_cols;
  std::size_t half_col = 0;
  {
    std::vector<double> all;
    for (const auto& p : pairs) all.push_back(p.time);
    all.push_back(t_half);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    sim_times = all;
    for (const auto& p : pairs)
      spec_cols.push_back(static_cast<std::size_t>(
          std::lower_bound(all.begin(), all.end(), p.time) - all.begin()));
    half_col = static_cast<std::size_t>(
        std::lower_bound(all.begin(), all.end(), t_half) - all.begin());
  }

  std::vector<std::vector<double>> selfsim_diffs_last;  // per replicate, largest T
  for (std::size_t rung = 0; rung < config.T_ladder.size(); ++rung) {
    const double T = config.T_ladder[rung];
    SimConfig sim = SimConfig::derive(T, sim_times, config.sigma, config.phi,
                                      config.seed);
    sim.replicate_index = rung * config.replicates;
    const auto raw = run_replicates(sim, config.replicates, config.threads);

    // project onto the spec's checkpoints
    std::vector<ReplicateResult> projected(raw.size());
    for (std::size_t r = 0; r < raw.size(); ++r) {
      projected[r].values.reserve(spec_cols.size());
      for (std::size_t c : spec_cols)
        projected[r].values.push_back(raw[r].values[c]);
      projected[r].peak_population = raw[r].peak_population;
      projected[r].branch_events = raw[r].branch_events;
    }

    HorizonResult hr;
    hr.T = T;
    hr.laplace = estimate_laplace(projected, config.spec, mass);
    hr.gap_to_theory = std::fabs(hr.laplace.estimate - report.theory_laplace);

    std::vector<double> column(raw.size());
    for (std::size_t k = 0; k < spec_cols.size(); ++k) {
      for (std::size_t r = 0; r < raw.size(); ++r)
        column[r] = raw[r].values[spec_cols[k]] / mass;
      auto [mean, se] = mean_and_stderr(column);
      hr.empirical_means.push_back(mean);
      hr.mean_stderrors.push_back(se);
      hr.mean_z_scores.push_back(se > 0.0 ? (mean - pairs[k].time) / se : 0.0);
    }
    for (std::size_t r = 0; r < raw.size(); ++r)
      column[r] = raw[r].values[spec_cols.back()] / mass;
    hr.variance_last = sample_variance(column);

    if (rung + 1 == config.T_ladder.size()) {
      // paired self-similarity differences on the final rung
      selfsim_diffs_last.resize(1);
      auto& diffs = selfsim_diffs_last[0];
      diffs.resize(raw.size());
      for (std::size_t r = 0; r < raw.size(); ++r) {
        const double v_half = raw[r].values[half_col] / mass;
        const double v_last = raw[r].values[spec_cols.back()] / mass;
        diffs[r] = std::exp(-theta_n * v_half) -
                   std::exp(-theta_n * (t_half / t_n) * v_last);
      }
    }
    report.per_horizon.push_back(std::move(hr));
  }

  // verdicts
  double worst_mean_z = 0.0;
  for (const auto& hr : report.per_horizon)
    for (double z : hr.mean_z_scores)
      worst_mean_z = std::max(worst_mean_z, std::fabs(z));
  report.verdicts.push_back({"mean-gate", worst_mean_z <= 3.0, 3.0 - worst_mean_z});

  const auto& first = report.per_horizon.front();
  const auto& last = report.per_horizon.back();
  if (!degenerate) {
    double worst_increase = 0.0;
    for (std::size_t i = 1; i < report.per_horizon.size(); ++i)
      worst_increase = std::max(worst_increase,
                                report.per_horizon[i].gap_to_theory -
                                    report.per_horizon[i - 1].gap_to_theory);
    report.verdicts.push_back(
        {"laplace-trend", worst_increase <= 0.0, -worst_increase});
    const double allowance = 3.0 * last.laplace.stderror + 0.02;
    report.verdicts.push_back({"laplace-final", last.gap_to_theory <= allowance,
                               allowance - last.gap_to_theory});
    const double tol = 0.25 * report.theory_variance;
    const double var_err = std::fabs(last.variance_last - report.theory_variance);
    report.verdicts.push_back({"variance-gate", var_err <= tol, tol - var_err});
  } else {
    double worst_drop = 0.0;
    for (std::size_t i = 1; i < report.per_horizon.size(); ++i)
      worst_drop = std::max(worst_drop, report.per_horizon[i - 1].laplace.estimate -
                                            report.per_horizon[i].laplace.estimate);
    report.verdicts.push_back({"laplace-trend", worst_drop <= 0.0, -worst_drop});
    const double rise = last.laplace.estimate - first.laplace.estimate;
    const double pooled = std::sqrt(first.laplace.stderror * first.laplace.stderror +
                                    last.laplace.stderror * last.laplace.stderror);
    report.verdicts.push_back(
        {"laplace-final", rise >= 3.0 * pooled, rise - 3.0 * pooled});
  }

  // self-similarity: solver identity (finite K only) and the paired
  // empirical difference
  if (!degenerate) {
    const double a =
        log_laplace(LaplaceSpec::single(theta_n, t_half), K, config.grid);
    const double b = log_laplace(LaplaceSpec::single(theta_n * t_half / t_n, t_n),
                                 K, config.grid);
    const double tol = 10.0 * config.grid.step();
    report.verdicts.push_back(
        {"self-similar-solver", std::fabs(a - b) <= tol, tol - std::fabs(a - b)});
  }
  {
    auto [mean, se] = mean_and_stderr(selfsim_diffs_last[0]);
    const bool pass = se == 0.0 ? mean == 0.0 : std::fabs(mean) <= 3.0 * se;
    report.verdicts.push_back(
        {"self-similar-empirical", pass, 3.0 * se - std::fabs(mean)});
  }

  return report;
}

}  // namespace sdbbm
