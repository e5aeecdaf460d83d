#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "mcmc/mixing.hpp"

namespace {

using namespace mcmc;

void BM_StationaryDirect(benchmark::State& state) {
  Rng rng(1);
  const auto chain = testing::random_positive_chain(rng, static_cast<std::size_t>(state.range(0)));
  StationaryOptions options;
  options.method = StationaryMethod::DirectSolve;
  for (auto _ : state) benchmark::DoNotOptimize(stationary_distribution(chain, options));
}
BENCHMARK(BM_StationaryDirect)->RangeMultiplier(4)->Range(8, 512);

void BM_StationaryPower(benchmark::State& state) {
  Rng rng(2);
  const auto chain = testing::random_sparse_ergodic_chain(rng, static_cast<std::size_t>(state.range(0)));
  StationaryOptions options;
  options.method = StationaryMethod::PowerIteration;
  for (auto _ : state) benchmark::DoNotOptimize(stationary_distribution(chain, options));
}
BENCHMARK(BM_StationaryPower)->Arg(16)->Arg(64);

void BM_DistanceCurve(benchmark::State& state) {
  Rng rng(3);
  const auto chain = testing::random_sparse_ergodic_chain(rng, static_cast<std::size_t>(state.range(0)));
  const auto threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(distance_curve(chain, 200, threads));
}
BENCHMARK(BM_DistanceCurve)->Args({32, 1})->Args({256, 1})->Args({256, 4});

void BM_Period(benchmark::State& state) {
  Rng rng(4);
  const auto chain = testing::random_sparse_ergodic_chain(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(is_aperiodic(chain));
}
BENCHMARK(BM_Period)->Arg(64)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
