#include <limits>

#include <benchmark/benchmark.h>

#include "mcmc/bayes.hpp"
#include "mcmc/counting.hpp"
#include "mcmc/mh.hpp"

namespace {

using namespace mcmc;

void BM_MhStepNormal(benchmark::State& state) {
  const TargetDensity target{[](PointView x) { return -0.5 * x[0] * x[0]; }, 1};
  const auto jump = random_walk_kernel(1.0, 1);
  Rng rng(kDefaultSeed);
  Point current{0.0};
  for (auto _ : state) {
    auto step = mh_step(current, target, jump, rng);
    current = std::move(step.next);
    benchmark::DoNotOptimize(current);
  }
}
BENCHMARK(BM_MhStepNormal);

void BM_RunChainBetaBinomial(benchmark::State& state) {
  const auto model = beta_binomial_model(1, 1);
  const Dataset data{{}, io::BinomialCounts{7, 10}};
  const TargetDensity target{[&](PointView t) {
                               return model.space.contains(t) ? log_posterior_unnorm(model, t, data)
                                                              : -std::numeric_limits<double>::infinity();
                             },
                             1};
  RunOptions options;
  options.m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_chain(target, random_walk_kernel(0.3, 1), Point{0.5}, options));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunChainBetaBinomial)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_GridMap(benchmark::State& state) {
  const auto model = beta_binomial_model(1, 1);
  const Dataset data{{}, io::BinomialCounts{7, 10}};
  const auto grid = as_points(uniform_grid(0.001, 0.999, 0.001));
  for (auto _ : state) benchmark::DoNotOptimize(map_estimate(model, data, grid));
}
BENCHMARK(BM_GridMap);

void BM_BuildTree(benchmark::State& state) {
  const auto problem = independent_set_instance(Graph::path(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(build_tree(problem));
}
BENCHMARK(BM_BuildTree)->Arg(8)->Arg(16);

void BM_SamplerDraw(benchmark::State& state) {
  const auto tree = build_tree(independent_set_instance(Graph::path(static_cast<std::size_t>(state.range(0)))));
  AlmostUniformSampler sampler(tree, 0, 0.05, kDefaultSeed);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.next_leaf());
  state.counters["interval"] = static_cast<double>(sampler.interval());
}
BENCHMARK(BM_SamplerDraw)->Arg(3)->Arg(6);

void BM_ApproximateCount(benchmark::State& state) {
  const auto problem = independent_set_instance(Graph::path(static_cast<std::size_t>(state.range(0))));
  CountOptions options;
  options.threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(approximate_count(problem, 0.3, 0.2, kDefaultSeed, options));
}
BENCHMARK(BM_ApproximateCount)->Args({4, 1})->Args({4, 4})->Unit(benchmark::kMillisecond);

}  // namespace
