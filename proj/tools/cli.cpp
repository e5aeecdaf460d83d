#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>

#include "mcmc/bayes.hpp"
#include "mcmc/chain_io.hpp"
#include "mcmc/counting.hpp"
#include "mcmc/errors.hpp"
#include "mcmc/io.hpp"
#include "mcmc/mh.hpp"
#include "mcmc/mixing.hpp"

namespace mcmc::cli {
namespace {

using io::format_double;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
  return quoted + "\"";
}

const char* yes_no(bool b) { return b ? "true" : "false"; }

BayesModel make_model(const RunConfig& config) {
  if (config.model == "beta-binomial") return beta_binomial_model(config.prior_a, config.prior_b);
  if (config.model == "normal") return normal_known_variance_model(config.sigma, config.prior_mean, config.prior_sd);
  throw Error(ErrorCode::InvalidArgument, "unknown model '" + config.model + "'");
}

Dataset load_dataset(const RunConfig& config) {
  Dataset data;
  if (config.model == "beta-binomial")
    data.binomial = io::read_binomial_csv(config.data_path);
  else
    data.x = io::read_column_csv(config.data_path);
  return data;
}

TargetDensity posterior_target(const BayesModel& model, const Dataset& data) {
  TargetDensity target;
  target.dimension = model.space.dimension();
  target.log_f = [&model, &data](PointView theta) {
    if (!model.space.contains(theta)) return -std::numeric_limits<double>::infinity();
    return model.log_likelihood(theta, data) + model.log_prior(theta);
  };
  return target;
}

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

void emit(const RunConfig& config, const std::string& report, std::ostream& out) {
  if (config.out_path.empty()) {
    out << report;
    return;
  }
  std::ofstream file(config.out_path, std::ios::binary);
  if (!file) throw Error(ErrorCode::Io, "cannot write " + config.out_path);
  file << report;
}

}  // namespace

std::string cmd_chain_analyze(const RunConfig& config) {
  const auto chain = read_chain_file(config.matrix_path);
  if (!config.normalized_out_path.empty()) write_chain_file(config.normalized_out_path, chain);

  std::ostringstream os;
  os << "quantity,value\n";
  os << "states," << chain.size() << '\n';
  const bool irreducible = is_irreducible(chain);
  os << "irreducible," << yes_no(irreducible) << '\n';

  bool every_state_returns = true;
  bool aperiodic = true;
  const auto periods = state_periods(chain);
  for (std::size_t x = 0; x < chain.size(); ++x) {
    os << csv_field("period[" + chain.state(x) + "]") << ',';
    if (periods[x] == 0) {
      every_state_returns = false;
      os << "no_return\n";
    } else {
      aperiodic = aperiodic && periods[x] == 1;
      os << periods[x] << '\n';
    }
  }
  os << "aperiodic," << (every_state_returns ? yes_no(aperiodic) : "undefined") << '\n';

  if (!irreducible) {
    os << "stationary,not_unique\n";
    return os.str();
  }
  const auto pi = stationary_distribution(chain);
  for (std::size_t x = 0; x < chain.size(); ++x)
    os << csv_field("stationary[" + chain.state(x) + "]") << ',' << format_double(pi[x]) << '\n';
  const double residual = detailed_balance_residual(chain, pi);
  os << "detailed_balance_residual," << format_double(residual) << '\n';
  os << "reversible," << yes_no(residual <= kReversibilityTolerance) << '\n';
  return os.str();
}

std::string cmd_mix(const RunConfig& config) {
  const auto chain = read_chain_file(config.matrix_path);
  const auto report = mixing_report(chain, config.epsilon, config.t_max, config.threads);
  std::ostringstream os;
  os << "t,d_t\n";
  for (const auto& [t, d] : report.d_curve) os << t << ',' << format_double(d) << '\n';
  os << "t_mix," << report.t_mix << '\n';
  os << "C,alpha\n";
  os << format_double(report.envelope.C) << ',' << format_double(report.envelope.alpha) << '\n';
  return os.str();
}

std::string cmd_mh_run(const RunConfig& config) {
  const auto model = make_model(config);
  const auto data = load_dataset(config);
  const auto grid = as_points(default_grid(model, data, config.grid_step));
  const Point start = map_estimate(model, data, grid);

  RunOptions options;
  options.m = config.m;
  options.burn_in = config.burn_in;
  options.thin = config.thin;
  options.seed = config.seed;
  const auto trace = run_chain(posterior_target(model, data), random_walk_kernel(config.scale, 1), start, options);
  std::ostringstream os;
  write_trace_csv(os, trace);
  return os.str();
}

std::string cmd_bayes_fit(const RunConfig& config) {
  const auto model = make_model(config);
  const auto data = load_dataset(config);
  const auto scalar_grid = default_grid(model, data, config.grid_step);
  const auto grid = as_points(scalar_grid);
  const Point mle = mle_estimate(model, data, grid);
  const Point map = map_estimate(model, data, grid);

  // Proposal width from the exact grid posterior, fixed before sampling.
  const auto posterior = posterior_grid(model, data, scalar_grid);
  const double scale = std::max(2.4 * std::sqrt(posterior.variance()), config.grid_step);

  RunOptions options;
  options.m = config.m;
  options.burn_in = config.burn_in;
  options.thin = config.thin;
  options.seed = config.seed;
  const auto trace = run_chain(posterior_target(model, data), random_walk_kernel(scale, 1), map, options);
  const auto mean = posterior_mean(trace, [](PointView theta) { return theta[0]; });

  std::ostringstream os;
  os << "estimator,value\n";
  os << "mle," << format_double(mle[0]) << '\n';
  os << "map," << format_double(map[0]) << '\n';
  os << "posterior_mean," << format_double(mean.estimate) << '\n';
  os << "posterior_sd," << format_double(sample_sd(trace.column(0))) << '\n';
  return os.str();
}

std::string cmd_count(const RunConfig& config) {
  const auto edges = io::read_edge_list(config.graph_path);
  const std::size_t n = std::max(edges.vertices, config.vertices.value_or(0));
  const auto problem = independent_set_instance(Graph::from_edges(n, edges.edges));

  CountOptions options;
  options.threads = config.threads;
  const auto estimate = approximate_count(problem, config.epsilon, config.delta, config.seed, options);

  std::string exact;
  try {
    exact = std::to_string(brute_force_count(problem));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NodeCapExceeded) throw;
  }
  std::ostringstream os;
  os << "estimate,epsilon,delta,seed,exact_if_available\n";
  os << format_double(estimate.estimate) << ',' << format_double(estimate.epsilon) << ','
     << format_double(estimate.delta) << ',' << estimate.seed << ',' << exact << '\n';
  return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  config.seed = kDefaultSeed;

  CLI::App app{"Markov chain Monte Carlo toolkit: chain diagnostics, MH sampling, Bayesian fits, approximate counting",
               "mcmc"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--threads", config.threads, "Worker threads; never changes results")
      ->check(CLI::Range(1U, 256U));
  app.add_option("--out", config.out_path, "Write the report here instead of standard output");
  app.add_option("--seed", config.seed, "Master seed (default " + std::to_string(kDefaultSeed) + ")");

  const auto probability = CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));

  auto* chain = app.add_subcommand("chain", "Finite Markov chain analysis")->require_subcommand(1);
  auto* analyze = chain->add_subcommand("analyze", "Irreducibility, periods, stationary distribution, detailed balance");
  analyze->add_option("--matrix", config.matrix_path, "Chain JSON file")->required()->check(CLI::ExistingFile);
  analyze->add_option("--normalized-out", config.normalized_out_path, "Also write the validated chain as JSON");
  auto* mix = chain->add_subcommand("mix", "Distance-to-stationarity curve, mixing time, geometric envelope");
  mix->add_option("--matrix", config.matrix_path, "Chain JSON file")->required()->check(CLI::ExistingFile);
  mix->add_option("--eps", config.epsilon, "Mixing-time threshold in (0, 1)")->required()->check(probability);
  mix->add_option("--tmax", config.t_max, "Curve horizon (>= 2)")->check(CLI::Range(std::size_t{2}, std::size_t{1'000'000}));

  auto add_model_flags = [&config](CLI::App* sub) {
    sub->add_option("--model", config.model, "beta-binomial or normal")
        ->required()
        ->check(CLI::IsMember({"beta-binomial", "normal"}));
    sub->add_option("--data", config.data_path, "Dataset CSV (x column, or successes,trials)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--m", config.m, "Total MH iterations, burn-in included")->check(CLI::PositiveNumber);
    sub->add_option("--burn-in", config.burn_in, "Discarded prefix (default m/10)");
    sub->add_option("--thin", config.thin, "Keep every k-th iteration")->check(CLI::PositiveNumber);
    sub->add_option("--grid-step", config.grid_step, "Grid resolution for MLE/MAP")->check(CLI::PositiveNumber);
    sub->add_option("--prior-a", config.prior_a, "Beta prior a")->check(CLI::PositiveNumber);
    sub->add_option("--prior-b", config.prior_b, "Beta prior b")->check(CLI::PositiveNumber);
    sub->add_option("--sigma", config.sigma, "Known observation sd (normal model)")->check(CLI::PositiveNumber);
    sub->add_option("--prior-mean", config.prior_mean, "Normal prior mean");
    sub->add_option("--prior-sd", config.prior_sd, "Normal prior sd")->check(CLI::PositiveNumber);
  };

  auto* mh = app.add_subcommand("mh", "Metropolis-Hastings sampling")->require_subcommand(1);
  auto* mh_run = mh->add_subcommand("run", "Random-walk MH on a built-in posterior; writes the trace CSV");
  add_model_flags(mh_run);
  mh_run->add_option("--scale", config.scale, "Random-walk proposal sd")->check(CLI::PositiveNumber);

  auto* bayes = app.add_subcommand("bayes", "Bayesian point estimation")->require_subcommand(1);
  auto* fit = bayes->add_subcommand("fit", "MLE, MAP, posterior mean and sd");
  add_model_flags(fit);

  auto* count = app.add_subcommand("count", "Approximate counting of independent sets")->require_subcommand(1);
  auto* estimate = count->add_subcommand("estimate", "Level-ratio estimate from almost-uniform samples");
  estimate->add_option("--graph", config.graph_path, "Edge list, one 'u v' per line")->required()->check(CLI::ExistingFile);
  estimate->add_option("--eps", config.epsilon, "Ratio slack in (0, 1)")->required()->check(probability);
  estimate->add_option("--delta", config.delta, "Failure probability in (0, 1)")->required()->check(probability);
  estimate->add_option("--vertices", config.vertices, "Vertex count when isolated vertices are not listed");

  try {
    std::vector<std::string> reversed(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(reversed.begin(), reversed.end());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (config.burn_in && *config.burn_in >= config.m)
      throw CLI::ValidationError("--burn-in", "must be smaller than --m");

    std::string report;
    if (analyze->parsed()) {
      config.command = "chain analyze";
      report = cmd_chain_analyze(config);
    } else if (mix->parsed()) {
      config.command = "chain mix";
      report = cmd_mix(config);
    } else if (mh_run->parsed()) {
      config.command = "mh run";
      report = cmd_mh_run(config);
    } else if (fit->parsed()) {
      config.command = "bayes fit";
      report = cmd_bayes_fit(config);
    } else if (estimate->parsed()) {
      config.command = "count estimate";
      report = cmd_count(config);
    }
    emit(config, report, out);
    return kSuccess;
  } catch (const CLI::ValidationError& e) {
    err << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.category() == ErrorCategory::Domain ? kDomain : kNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumeric;
  }
}

}  // namespace mcmc::cli
