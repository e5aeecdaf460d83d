#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <variant>
#include <vector>

#include "mcmc/chain.hpp"
#include "mcmc/rng.hpp"

namespace mcmc {

using Point = std::vector<double>;
using PointView = std::span<const double>;

/// Unnormalized log-density; -infinity marks zero density. Finite targets
/// use one-coordinate points holding the state index.
struct TargetDensity {
  std::function<double(PointView)> log_f;
  std::size_t dimension = 1;

  /// Evaluates log_f; throws NaNDensity instead of returning NaN.
  double operator()(PointView x) const;
};

struct JumpKernel {
  std::function<Point(PointView current, Rng& rng)> sample;
  /// log J(to | from).
  std::function<double(PointView to, PointView from)> log_density;
  bool symmetric = false;
};

struct Trace {
  std::vector<Point> samples;
  std::vector<std::size_t> iterations;  // 1-based iteration that produced each sample
  std::vector<bool> accepted;           // whether that iteration accepted its candidate
  std::size_t accepted_count = 0;
  std::size_t proposed_count = 0;
  std::uint64_t seed = 0;
  std::size_t m = 0;
  std::size_t burn_in = 0;
  std::size_t thin = 1;

  std::size_t dimension() const { return samples.empty() ? 0 : samples.front().size(); }
  /// Coordinate `coord` of every sample.
  std::vector<double> column(std::size_t coord = 0) const;
};

/// log r = log f(cand) - log f(cur) + log J(cur|cand) - log J(cand|cur).
/// Jump terms are skipped for symmetric kernels. Returns -inf when the
/// candidate has zero density.
double log_mh_ratio(const TargetDensity& target, const JumpKernel& jump, PointView current,
                    PointView candidate);

struct StepResult {
  Point next;
  bool accepted = false;
};

/// One Metropolis-Hastings transition. Draws the candidate and then U on
/// every call, accepted or not; accepts iff log U < min(0, log r).
StepResult mh_step(PointView current, const TargetDensity& target, const JumpKernel& jump, Rng& rng);

using InitSampler = std::function<Point(Rng&)>;
using Initializer = std::variant<Point, InitSampler>;

inline constexpr std::size_t kInitRetries = 1000;

struct RunOptions {
  std::size_t m = 0;                     // total iterations, burn-in included
  std::optional<std::size_t> burn_in;    // defaults to m / 10
  std::size_t thin = 1;
  std::uint64_t seed = kDefaultSeed;
};

/// Runs m iterations and keeps theta_{b+1}, theta_{b+1+thin}, ... for
/// floor((m - b) / thin) samples. Deterministic in the seed.
Trace run_chain(const TargetDensity& target, const JumpKernel& jump, const Initializer& init,
                const RunOptions& options);

/// Explicit MH transition matrix for a finite target under a finite jump
/// chain. Verifies detailed balance against the normalized weights to 1e-12.
FiniteChain finite_mh_kernel(std::span<const double> target_weights, const FiniteChain& jump);

double acceptance_rate(const Trace& trace);

/// Gaussian random-walk proposal with per-coordinate standard deviation `scale`.
JumpKernel random_walk_kernel(double scale, std::size_t dimension);

/// Proposal that moves state index i to j with probability jump(i, j).
JumpKernel finite_jump_kernel(const FiniteChain& jump);

/// Target with log f(i) = log weights[i] on state indices, -inf elsewhere.
TargetDensity finite_target(std::vector<double> weights);

/// Batch-means standard error of the mean of a correlated series.
double batch_means_standard_error(std::span<const double> series, std::size_t batches = 50);

/// CSV with `#` metadata lines, then `iteration,theta_1..theta_d,accepted`.
void write_trace_csv(std::ostream& out, const Trace& trace);

}  // namespace mcmc
