#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Batch CLI entry points, split from main() so tests can drive the exact
// code path the binary runs. Every subcommand reads a JSON config, computes,
// and writes its output atomically (temp file + rename).
//
// Exit codes: 0 success, 1 parse/validation failure, 2 acceptance-gate
// failure (verify-ergodic only).

namespace sdbbm::cli {

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr const char* kSeedEnvVar = "SDBBM_SEED";

struct Options {
  std::string subcommand;
  std::string config_path;   // one of config_path / config_json must be set
  std::string config_json;   // inline JSON, alternative to a file
  std::string out_path;
  std::optional<std::uint64_t> seed;  // --seed override
  unsigned threads = 0;               // 0 = auto
};

int run(const Options& options);

// Parses argv (CLI11) and dispatches to run().
int main_entry(int argc, char** argv);

// Grid-refinement study used by the convergence-study subcommand and tests.
struct ConvergenceLevel {
  std::size_t m;
  double step;
  double sup_diff;  // sup |Lambda_m - Lambda_{2m}| on the coarse nodes
  double order;     // log2 of successive sup_diff ratios; NaN on first level
};

struct ConvergenceStudy {
  std::vector<ConvergenceLevel> levels;
  double order_estimate;  // mean of the defined per-level orders
};

ConvergenceStudy convergence_study(const std::vector<std::pair<double, double>>& pairs,
                                   double K, std::size_t base_m, int refinements);

}  // namespace sdbbm::cli
