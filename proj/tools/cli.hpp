#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mcmc::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kDomain = 2, kNumeric = 3 };

/// Everything a subcommand needs, filled from flags and validated before any
/// computation starts.
struct RunConfig {
  std::string command;  // "chain analyze", "chain mix", "mh run", "bayes fit", "count estimate"
  std::string matrix_path;
  std::string data_path;
  std::string graph_path;
  std::string out_path;
  std::string normalized_out_path;
  std::string model = "beta-binomial";

  std::size_t m = 100'000;
  std::optional<std::size_t> burn_in;
  std::size_t thin = 1;
  double epsilon = 0.25;
  double delta = 0.1;
  std::size_t t_max = 100;
  std::uint64_t seed = 0;
  double grid_step = 0.001;
  double scale = 0.1;
  std::optional<std::size_t> vertices;
  unsigned threads = 1;

  double prior_a = 1.0;
  double prior_b = 1.0;
  double sigma = 1.0;
  double prior_mean = 0.0;
  double prior_sd = 10.0;
};

std::string cmd_chain_analyze(const RunConfig& config);
std::string cmd_mix(const RunConfig& config);
std::string cmd_mh_run(const RunConfig& config);
std::string cmd_bayes_fit(const RunConfig& config);
std::string cmd_count(const RunConfig& config);

/// Parses argv, dispatches, and writes the report to --out or `out`.
/// Returns one of ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mcmc::cli
