#include "cli_app.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdbbm/experiment_harness.hpp"
#include "sdbbm/fractional_volterra.hpp"
#include "sdbbm/limit_laws.hpp"
#include "sdbbm/particle_sim.hpp"
#include "sdbbm/special_functions.hpp"

namespace sdbbm::cli {

namespace {

using nlohmann::json;

// Full round-trip decimal formatting; the process never calls setlocale, so
// the "C" locale's '.' decimal point applies.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void write_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

json load_config(const Options& options) {
  if (!options.config_json.empty()) return json::parse(options.config_json);
  std::ifstream in(options.config_path);
  if (!in)
    throw std::runtime_error("cannot open config file: " + options.config_path);
  return json::parse(in);
}

std::uint64_t resolve_seed(const Options& options, const json& config) {
  if (options.seed) return *options.seed;
  if (config.contains("seed")) return config.at("seed").get<std::uint64_t>();
  if (const char* env = std::getenv(kSeedEnvVar)) return std::strtoull(env, nullptr, 10);
  return kDefaultSeed;
}

LaplaceSpec parse_spec(const json& config) {
  std::vector<ThetaTime> pairs;
  for (const auto& p : config.at("pairs"))
    pairs.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return LaplaceSpec(std::move(pairs));
}

SolverGrid parse_grid(const json& j) {
  return SolverGrid(j.at("S").get<double>(), j.at("m").get<std::size_t>());
}

SigmaProfile parse_sigma(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const double gamma = j.at("gamma").get<double>();
  if (kind == "constant")
    return SigmaProfile::constant(j.at("level").get<double>(), gamma);
  if (kind == "indicator-window")
    return SigmaProfile::indicator_window(j.at("level").get<double>(),
                                          j.value("center", 0.0),
                                          j.at("halfwidth").get<double>(), gamma);
  if (kind == "gaussian-bump")
    return SigmaProfile::gaussian_bump(j.at("amplitude").get<double>(),
                                       j.at("width").get<double>(), gamma);
  if (kind == "table")
    return SigmaProfile::table(j.at("x0").get<double>(), j.at("dx").get<double>(),
                               j.at("values").get<std::vector<double>>(), gamma);
  throw std::invalid_argument("sigma: unknown kind '" + kind + "'");
}

TestFunction parse_phi(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "gaussian-bump")
    return TestFunction::gaussian_bump(j.at("amplitude").get<double>(),
                                       j.at("width").get<double>());
  if (kind == "raised-cosine")
    return TestFunction::raised_cosine(j.at("amplitude").get<double>(),
                                       j.at("radius").get<double>());
  if (kind == "table")
    return TestFunction::table(j.at("x0").get<double>(), j.at("dx").get<double>(),
                               j.at("values").get<std::vector<double>>());
  throw std::invalid_argument("phi: unknown kind '" + kind + "'");
}

unsigned resolve_threads(const Options& options) {
  if (options.threads == 0)
    return std::max(1u, std::thread::hardware_concurrency());
  return options.threads;
}

int cmd_q_function(const Options& options, const json& config) {
  std::ostringstream csv;
  csv << "x,Q\n";
  for (double x : config.at("x").get<std::vector<double>>())
    csv << fmt(x) << ',' << fmt(q_function(x)) << '\n';
  write_atomically(options.out_path, csv.str());
  std::cout << "q-function: wrote " << config.at("x").size() << " rows to "
            << options.out_path << "\n";
  return 0;
}

int cmd_solve_lambda(const Options& options, const json& config, bool extended) {
  const SolverGrid grid = parse_grid(config.at("grid"));
  const double K = config.at("K").get<double>();
  LambdaGrid lambda =
      extended ? solve_lambda_extended(config.at("theta").get<double>(), K, grid)
               : solve_lambda(parse_spec(config), K, grid);
  std::ostringstream csv;
  csv << "s,lambda\n";
  for (std::size_t i = 0; i < lambda.values.size(); ++i)
    csv << fmt(grid.point(i)) << ',' << fmt(lambda.values[i]) << '\n';
  write_atomically(options.out_path, csv.str());
  std::cout << (extended ? "lambda-extended" : "solve-lambda") << ": m=" << grid.m
            << " endpoint=" << fmt(lambda.values.back()) << " -> "
            << options.out_path << "\n";
  return 0;
}

int cmd_log_laplace(const Options& options, const json& config) {
  const SolverGrid grid = parse_grid(config.at("grid"));
  const LaplaceSpec spec = parse_spec(config);
  const double K = config.at("K").get<double>();
  const LimitLawReport report = limit_law_report(spec, K, grid);
  const double full = log_laplace(spec, K, grid, LambdaIntegralRange::full);
  json out{
      {"K", K},
      {"pairs", config.at("pairs")},
      {"log_laplace", report.log_laplace},
      {"log_laplace_full_range", full},
      {"laplace", std::exp(report.log_laplace)},
      {"mean_vector", report.mean_vector},
      {"covariance_diag", report.covariance_diag},
  };
  write_atomically(options.out_path, out.dump(2) + "\n");
  std::cout << "log-laplace: " << fmt(report.log_laplace) << " -> "
            << options.out_path << "\n";
  return 0;
}

int cmd_levy_probe(const Options& options, const json& config) {
  const double K = config.at("K").get<double>();
  const SolverGrid grid = parse_grid(config.at("grid"));
  const double lo = config.value("theta_min", 0.1);
  const double hi = config.value("theta_max", 50.0);
  const double step = config.value("theta_step", 0.1);
  const int max_order = config.value("max_order", 4);
  std::vector<double> thetas;
  for (double t = lo; t <= hi + 1e-12; t += step) thetas.push_back(t);
  const LevyMomentReport report =
      complete_monotonicity_probe(K, thetas, max_order, grid);

  const SolverGrid slope_grid =
      config.contains("slope_grid") ? parse_grid(config.at("slope_grid"))
                                    : SolverGrid(1.0, 10000);
  const double slope = small_s_slope_check(1.0, slope_grid);

  json out{
      {"K", K},
      {"first_moment", report.first_moment},
      {"first_moment_target", 1.0},
      {"second_moment", report.second_moment},
      {"second_moment_target", 2.0 * K / M_PI},
      {"monotonicity_orders_checked", report.monotonicity_orders_checked},
      {"alternation_ok", report.alternation_ok},
      {"slope_estimate", slope},
      {"slope_target", 1.0 / M_PI},
  };
  write_atomically(options.out_path, out.dump(2) + "\n");
  std::cout << "levy-probe: alternation_ok="
            << (report.alternation_ok ? "true" : "false") << " -> "
            << options.out_path << "\n";
  return 0;
}

int cmd_degenerate_curve(const Options& options, const json& config) {
  const double theta = config.at("theta").get<double>();
  const auto K_list = config.at("K_list").get<std::vector<double>>();
  const SolverGrid grid = parse_grid(config.at("grid"));
  const auto curve = degenerate_limit_curve(theta, K_list, grid);
  std::ostringstream csv;
  csv << "K,value\n";
  for (const auto& [K, value] : curve) csv << fmt(K) << ',' << fmt(value) << '\n';
  write_atomically(options.out_path, csv.str());
  std::cout << "degenerate-curve: " << curve.size() << " rows -> "
            << options.out_path << "\n";
  return 0;
}

SimConfig parse_sim_config(const json& config, std::uint64_t seed) {
  SimConfig sim = SimConfig::derive(
      config.at("T").get<double>(),
      config.at("checkpoints").get<std::vector<double>>(),
      parse_sigma(config.at("sigma")), parse_phi(config.at("phi")), seed);
  if (config.contains("dt")) sim.dt = config.at("dt").get<double>();
  if (config.contains("window_halfwidth"))
    sim.window_halfwidth = config.at("window_halfwidth").get<double>();
  if (config.contains("population_cap"))
    sim.population_cap = config.at("population_cap").get<std::int64_t>();
  if (config.contains("replicate_index"))
    sim.replicate_index = config.at("replicate_index").get<std::uint64_t>();
  sim.validate();
  return sim;
}

int cmd_simulate(const Options& options, const json& config) {
  const std::uint64_t seed = resolve_seed(options, config);
  const SimConfig sim = parse_sim_config(config, seed);
  const auto R = config.at("replicates").get<std::size_t>();
  const auto results = run_replicates(sim, R, resolve_threads(options));

  std::ostringstream csv;
  csv << "replicate";
  for (double t : sim.checkpoints) csv << ",value@t=" << fmt_short(t);
  csv << ",peak_population,branch_events\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    csv << i;
    for (double v : results[i].values) csv << ',' << fmt(v);
    csv << ',' << results[i].peak_population << ',' << results[i].branch_events
        << '\n';
  }
  write_atomically(options.out_path, csv.str());
  std::cout << "simulate: " << R << " replicates (seed " << seed << ") -> "
            << options.out_path << "\n";
  return 0;
}

json horizon_to_json(const HorizonResult& hr) {
  return json{
      {"T", hr.T},
      {"laplace", hr.laplace.estimate},
      {"laplace_stderr", hr.laplace.stderror},
      {"empirical_means", hr.empirical_means},
      {"mean_stderrors", hr.mean_stderrors},
      {"mean_z_scores", hr.mean_z_scores},
      {"variance_last", hr.variance_last},
      {"gap_to_theory", hr.gap_to_theory},
  };
}

int cmd_verify_ergodic(const Options& options, const json& config) {
  ExperimentConfig exp{
      parse_sigma(config.at("sigma")),
      parse_phi(config.at("phi")),
      parse_spec(config),
      config.at("T_ladder").get<std::vector<double>>(),
      config.at("replicates").get<std::size_t>(),
      resolve_seed(options, config),
      resolve_threads(options),
      config.contains("grid") ? parse_grid(config.at("grid"))
                              : SolverGrid(1.0, 1000),
  };
  const ExperimentReport report = ergodic_experiment(exp);

  json out{
      {"degenerate", report.degenerate},
      {"theory_laplace", report.theory_laplace},
      {"theory_means", report.theory_means},
      {"theory_variance", report.theory_variance},
      {"per_horizon", json::array()},
      {"verdicts", json::array()},
      {"all_pass", report.all_pass()},
  };
  for (const auto& hr : report.per_horizon)
    out["per_horizon"].push_back(horizon_to_json(hr));
  for (const auto& v : report.verdicts)
    out["verdicts"].push_back(
        json{{"name", v.name}, {"pass", v.pass}, {"margin", v.margin}});
  write_atomically(options.out_path, out.dump(2) + "\n");

  std::ostringstream csv;
  csv << "T,laplace,laplace_stderr,gap_to_theory,variance_last";
  for (std::size_t k = 0; k < report.theory_means.size(); ++k)
    csv << ",mean_" << k << ",mean_z_" << k;
  csv << '\n';
  for (const auto& hr : report.per_horizon) {
    csv << fmt(hr.T) << ',' << fmt(hr.laplace.estimate) << ','
        << fmt(hr.laplace.stderror) << ',' << fmt(hr.gap_to_theory) << ','
        << fmt(hr.variance_last);
    for (std::size_t k = 0; k < hr.empirical_means.size(); ++k)
      csv << ',' << fmt(hr.empirical_means[k]) << ',' << fmt(hr.mean_z_scores[k]);
    csv << '\n';
  }
  write_atomically(options.out_path + ".csv", csv.str());

  for (const auto& v : report.verdicts)
    std::cout << "verify-ergodic: " << (v.pass ? "PASS " : "FAIL ") << v.name
              << " (margin " << fmt_short(v.margin) << ")\n";
  return report.all_pass() ? 0 : 2;
}

int cmd_convergence_study(const Options& options, const json& config) {
  std::vector<std::pair<double, double>> pairs;
  for (const auto& p : config.at("pairs"))
    pairs.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  const double K = config.at("K").get<double>();
  const auto base_m = config.value("base_m", std::size_t{1000});
  const int refinements = config.value("refinements", 3);
  const ConvergenceStudy study = convergence_study(pairs, K, base_m, refinements);

  std::ostringstream csv;
  csv << "level,m,step,sup_diff,order\n";
  for (std::size_t l = 0; l < study.levels.size(); ++l) {
    const auto& lev = study.levels[l];
    csv << l << ',' << lev.m << ',' << fmt(lev.step) << ',' << fmt(lev.sup_diff)
        << ',' << (std::isnan(lev.order) ? std::string("") : fmt(lev.order))
        << '\n';
  }
  write_atomically(options.out_path, csv.str());
  std::cout << "convergence-study: order estimate "
            << fmt_short(study.order_estimate) << " -> " << options.out_path
            << "\n";
  return 0;
}

}  // namespace

ConvergenceStudy convergence_study(const std::vector<std::pair<double, double>>& pairs,
                                   double K, std::size_t base_m, int refinements) {
  if (refinements < 1)
    throw std::invalid_argument("convergence_study: refinements >= 1");
  std::vector<ThetaTime> tt;
  for (const auto& [theta, t] : pairs) tt.push_back({theta, t});
  const LaplaceSpec spec(std::move(tt));

  ConvergenceStudy study;
  std::vector<double> prev;
  std::size_t m = base_m;
  double order_sum = 0.0;
  int order_count = 0;
  for (int level = 0; level <= refinements; ++level, m *= 2) {
    const SolverGrid grid(1.0, m);
    const LambdaGrid lambda = solve_lambda(spec, K, grid);
    if (level > 0) {
      double sup = 0.0;
      for (std::size_t i = 0; i < prev.size(); ++i)
        sup = std::max(sup, std::fabs(prev[i] - lambda.values[i * 2]));
      double order = std::numeric_limits<double>::quiet_NaN();
      if (!study.levels.empty() && study.levels.back().sup_diff > 0.0 && sup > 0.0) {
        order = std::log2(study.levels.back().sup_diff / sup);
        order_sum += order;
        ++order_count;
      }
      study.levels.push_back({m / 2, grid.step() * 2.0, sup, order});
    }
    prev = lambda.values;
  }
  study.order_estimate =
      order_count > 0 ? order_sum / order_count
                      : std::numeric_limits<double>::quiet_NaN();
  return study;
}

int run(const Options& options) {
  try {
    const json config = load_config(options);
    if (options.subcommand == "q-function") return cmd_q_function(options, config);
    if (options.subcommand == "solve-lambda")
      return cmd_solve_lambda(options, config, false);
    if (options.subcommand == "lambda-extended")
      return cmd_solve_lambda(options, config, true);
    if (options.subcommand == "log-laplace") return cmd_log_laplace(options, config);
    if (options.subcommand == "levy-probe") return cmd_levy_probe(options, config);
    if (options.subcommand == "degenerate-curve")
      return cmd_degenerate_curve(options, config);
    if (options.subcommand == "simulate") return cmd_simulate(options, config);
    if (options.subcommand == "verify-ergodic")
      return cmd_verify_ergodic(options, config);
    if (options.subcommand == "convergence-study")
      return cmd_convergence_study(options, config);
    std::cerr << "error: unknown subcommand '" << options.subcommand << "'\n";
    return 1;
  } catch (const json::parse_error& e) {
    std::cerr << "error: malformed JSON config: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: bad config: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"site-dependent branching Brownian motion: occupation-time "
               "limit laws, Volterra solver, and Monte Carlo verification"};
  app.require_subcommand(1);

  Options options;
  std::string threads_arg = "auto";
  const std::vector<std::string> names = {
      "solve-lambda",   "lambda-extended", "log-laplace",
      "levy-probe",     "degenerate-curve", "q-function",
      "simulate",       "verify-ergodic",   "convergence-study"};
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", options.config_path, "JSON config file");
    sub->add_option("--config-json", options.config_json, "inline JSON config");
    sub->add_option("--out", options.out_path, "output file path")->required();
    sub->add_option("--seed", options.seed, "seed override (u64)");
    sub->add_option("--threads", threads_arg, "worker threads (n or 'auto')");
    sub->callback([&options, name] { options.subcommand = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (options.config_path.empty() && options.config_json.empty()) {
    std::cerr << "error: one of --config / --config-json is required\n";
    return 1;
  }
  if (threads_arg == "auto") {
    options.threads = 0;
  } else {
    try {
      options.threads = static_cast<unsigned>(std::stoul(threads_arg));
    } catch (...) {
      std::cerr << "error: --threads expects a number or 'auto'\n";
      return 1;
    }
  }
  return run(options);
}

}  // namespace sdbbm::cli
