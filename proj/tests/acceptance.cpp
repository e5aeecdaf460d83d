// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Usage: acceptance [path/to/mcmc data_dir]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "mcmc/bayes.hpp"
#include "mcmc/counting.hpp"
#include "mcmc/mh.hpp"
#include "mcmc/mixing.hpp"

namespace {

using namespace mcmc;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> check;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

Outcome reversible_chains() {
  Rng rng(derive_seed(kDefaultSeed, 1));
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng.index(7);
    const auto pi = testing::random_distribution(rng, n);
    const auto got = stationary_distribution(testing::reversible_chain(rng, pi));
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(got[i] - pi[i]));
  }
  return {worst <= 1e-8, "100 chains, max |pi - pi_hat| = " + fmt(worst) + " (<= 1e-8)"};
}

Outcome mh_kernels() {
  Rng rng(derive_seed(kDefaultSeed, 2));
  double residual = 0.0, error = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng.index(9);
    std::vector<double> w(n);
    for (auto& v : w) v = 0.1 + 10 * rng.uniform();
    // The jump needs symmetric support, or MH rejects every move the jump
    // cannot reverse and the kernel splits into classes.
    const auto jump = rep % 2 ? testing::random_positive_chain(rng, n)
                              : testing::reversible_chain(rng, testing::random_distribution(rng, n));
    const auto p = finite_mh_kernel(w, jump);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<double> target;
    for (double v : w) target.push_back(v / total);
    residual = std::max(residual, detailed_balance_residual(p, ProbVector(p.states(), target)));
    const auto pi = stationary_distribution(p);
    for (std::size_t i = 0; i < n; ++i) error = std::max(error, std::abs(pi[i] - target[i]));
  }
  return {residual <= 1e-12 && error <= 1e-8,
          "100 kernels, balance residual " + fmt(residual) + " (<= 1e-12), stationary error " + fmt(error) +
              " (<= 1e-8)"};
}

Outcome envelopes() {
  Rng rng(derive_seed(kDefaultSeed, 3));
  // Rounding leaves d(t) wobbling around 1e-16 once the rows reach pi, so
  // both checks get the same 1e-12 slack.
  constexpr double kSlack = 1e-12;
  double excess = -1.0;
  double largest_increase = 0.0;
  std::size_t increases = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rng.index(15);
    const auto chain = rep % 2 ? testing::random_positive_chain(rng, n) : testing::random_sparse_ergodic_chain(rng, n);
    const auto curve = distance_curve(chain, 200);
    const auto env = fit_geometric_envelope(curve);
    for (std::size_t t = 0; t < curve.size(); ++t) {
      excess = std::max(excess, curve[t] - env.C * std::pow(env.alpha, static_cast<double>(t)));
      if (t == 0) continue;
      largest_increase = std::max(largest_increase, curve[t] - curve[t - 1]);
      if (curve[t] > curve[t - 1] + kSlack) ++increases;
    }
  }
  return {excess <= kSlack && increases == 0,
          "50 chains, t <= 200, max d(t) - C a^t = " + fmt(excess) + " (<= 1e-12), max d(t) - d(t-1) = " +
              fmt(largest_increase) + " (<= 1e-12)"};
}

Outcome ergodic_averages() {
  const auto jump = validate_chain(std::vector<std::vector<double>>{{0.5, 0.5}, {0.5, 0.5}});
  RunOptions options;
  options.m = 100'000;
  options.seed = kDefaultSeed;
  const auto finite = run_chain(finite_target({2, 1}), finite_jump_kernel(jump), Point{0}, options);
  const auto indicator = posterior_mean(finite, [](PointView t) { return t[0] == 0 ? 1.0 : 0.0; });
  const double finite_error = std::abs(indicator.estimate - 2.0 / 3.0);

  const auto model = beta_binomial_model(1, 1);
  const Dataset data{{}, io::BinomialCounts{7, 10}};
  TargetDensity posterior{[&](PointView t) {
                            return model.space.contains(t) ? log_posterior_unnorm(model, t, data)
                                                           : -std::numeric_limits<double>::infinity();
                          },
                          1};
  const auto trace = run_chain(posterior, random_walk_kernel(0.3, 1), Point{0.5}, options);
  const double beta_error = std::abs(posterior_mean(trace, [](PointView t) { return t[0]; }).estimate - 8.0 / 12.0);
  return {finite_error <= 0.02 && beta_error <= 0.01,
          "indicator error " + fmt(finite_error) + " (<= 0.02), Beta(8,4) mean error " + fmt(beta_error) +
              " (<= 0.01)"};
}

Outcome risk_scans() {
  Rng rng(derive_seed(kDefaultSeed, 5));
  int squared_ok = 0, zero_one_ok = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 5 + rng.index(60);
    const double step = std::ldexp(1.0, -static_cast<int>(rng.index(6)));
    const double lower = step * static_cast<double>(static_cast<int>(rng.index(40)) - 20);
    std::vector<double> points(n), weights(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      points[i] = lower + static_cast<double>(i) * step;
      total += (weights[i] = std::pow(rng.uniform(), 3.0));
    }
    for (auto& w : weights) w /= total;
    const PosteriorGrid grid(points, weights);

    const auto argmin = [&](const Loss& loss) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (risk(loss, points[i], grid) < risk(loss, points[best], grid)) best = i;
      return best;
    };
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(points[i] - grid.mean()) < std::abs(points[nearest] - grid.mean())) nearest = i;
    squared_ok += argmin(Loss::squared()) == nearest;
    zero_one_ok += argmin(Loss::zero_one(step)) == grid.mode_index();
  }
  return {squared_ok == 50 && zero_one_ok == 50,
          "squared argmin = nearest-to-mean in " + std::to_string(squared_ok) + "/50, 0-1 argmin = mode in " +
              std::to_string(zero_one_ok) + "/50"};
}

Outcome estimators() {
  const auto model = beta_binomial_model(1, 1);
  const Dataset data{{}, io::BinomialCounts{7, 10}};
  const auto grid = as_points(uniform_grid(0.001, 0.999, 0.001));
  const double mle = mle_estimate(model, data, grid)[0];
  const double map = map_estimate(model, data, grid)[0];
  return {std::abs(mle - 0.7) <= 0.001 && std::abs(map - 0.7) <= 0.001,
          "MLE " + fmt(mle) + ", MAP " + fmt(map) + " (0.700 +- 0.001)"};
}

Outcome counting() {
  std::size_t mismatches = 0;
  for (std::size_t n = 0; n <= 12; ++n)
    for (const auto& g : {Graph::path(n), Graph::cycle(n), Graph::empty(n)}) {
      const auto problem = independent_set_instance(g);
      mismatches += build_tree(problem).leaf_count() != brute_force_count(problem);
    }

  const auto p3 = build_tree(independent_set_instance(Graph::path(3)));
  AlmostUniformSampler sampler(p3, 0, 0.05, kDefaultSeed);
  std::map<std::size_t, int> freq;
  const int draws = 10'000;
  for (int i = 0; i < draws; ++i) ++freq[sampler.next_leaf()];
  double tv = 0.0;
  for (std::size_t leaf : p3.leaves()) tv += 0.5 * std::abs(freq[leaf] / static_cast<double>(draws) - 0.2);

  int within = 0;
  const auto p4 = independent_set_instance(Graph::path(4));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const double est = approximate_count(p4, 0.1, 0.1, seed).estimate;
    within += est >= 8.0 / 1.1 && est <= 8.0 * 1.1;
  }
  return {mismatches == 0 && tv <= 0.05 && within >= 18,
          "leaf/brute mismatches " + std::to_string(mismatches) + " of 39, P3 sampler TV " + fmt(tv) +
              " (<= 0.05), P4 within 1.1x in " + std::to_string(within) + "/20 (>= 18)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism(const std::string& mcmc, const std::string& data) {
  if (mcmc.empty()) return {false, "mcmc binary path not given"};
  const std::vector<std::pair<std::string, std::string>> commands{
      {"chain analyze", "chain analyze --matrix " + data + "/two_state.json"},
      {"chain mix", "chain mix --matrix " + data + "/two_state.json --eps 0.01 --tmax 50"},
      {"mh run", "mh run --model beta-binomial --data " + data + "/binomial_7_10.csv --m 20000 --seed 7"},
      {"bayes fit", "bayes fit --model normal --data " + data + "/normal_sample.csv --m 20000 --seed 7"},
      {"count estimate", "count estimate --graph " + data + "/p3.edges --eps 0.2 --delta 0.1 --seed 7"},
  };
  const auto dir = fs::temp_directory_path() / "mcmckit_acceptance";
  fs::create_directories(dir);
  int identical = 0;
  std::string failed;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::string outputs[2];
    bool ran = true;
    for (int k = 0; k < 2; ++k) {
      const auto file = dir / ("run" + std::to_string(i) + "_" + std::to_string(k) + ".csv");
      fs::remove(file);
      const std::string line = "\"" + mcmc + "\" --out \"" + file.string() + "\" " + commands[i].second;
      ran = ran && std::system(line.c_str()) == 0;
      outputs[k] = slurp(file);
    }
    if (ran && !outputs[0].empty() && outputs[0] == outputs[1])
      ++identical;
    else
      failed += " [" + commands[i].first + "]";
  }
  return {identical == static_cast<int>(commands.size()),
          std::to_string(identical) + "/" + std::to_string(commands.size()) +
              " subcommands byte-identical across two runs" + failed};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mcmc = argc > 1 ? argv[1] : "";
  const std::string data = argc > 2 ? argv[2] : "data";

  const std::vector<Criterion> criteria{
      {1, "reversible chains recover pi", 5, reversible_chains},
      {2, "MH kernels satisfy detailed balance", 5, mh_kernels},
      {3, "geometric envelope dominates d(t)", 10, envelopes},
      {4, "ergodic averages", 10, ergodic_averages},
      {5, "risk minimizers", 5, risk_scans},
      {6, "MLE and MAP on 7/10", 1, estimators},
      {7, "counting", 60, counting},
      {8, "CLI determinism", 60, [&] { return cli_determinism(mcmc, data); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = outcome.pass && seconds < c.limit_seconds;
    failures += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.name << "): " << outcome.detail
              << "; " << fmt(seconds) << " s (limit " << c.limit_seconds << " s)" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
