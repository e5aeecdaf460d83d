#include "mcmc/mh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "mcmc/errors.hpp"
#include "mcmc/io.hpp"

namespace mcmc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double checked(double v, const char* what) {
  if (std::isnan(v)) throw Error(ErrorCode::NaNDensity, std::string(what) + " evaluated to NaN");
  return v;
}

double ratio_given_current(double log_f_current, double log_f_candidate, const JumpKernel& jump,
                           PointView current, PointView candidate) {
  if (log_f_candidate == kNegInf) return kNegInf;
  double log_r = log_f_candidate - log_f_current;
  if (!jump.symmetric) {
    log_r += checked(jump.log_density(current, candidate), "jump density");
    log_r -= checked(jump.log_density(candidate, current), "jump density");
  }
  return checked(log_r, "MH ratio");
}

struct CachedStep {
  Point next;
  double log_f = 0.0;
  bool accepted = false;
};

CachedStep step_cached(PointView current, double log_f_current, const TargetDensity& target,
                       const JumpKernel& jump, Rng& rng) {
  Point candidate = jump.sample(current, rng);
  const double u = rng.uniform();
  const double log_f_candidate = target(candidate);
  const double log_r = ratio_given_current(log_f_current, log_f_candidate, jump, current, candidate);
  if (std::log(u) < std::min(0.0, log_r)) return {std::move(candidate), log_f_candidate, true};
  return {Point(current.begin(), current.end()), log_f_current, false};
}

}  // namespace

double TargetDensity::operator()(PointView x) const { return checked(log_f(x), "target density"); }

std::vector<double> Trace::column(std::size_t coord) const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.at(coord));
  return out;
}

double log_mh_ratio(const TargetDensity& target, const JumpKernel& jump, PointView current,
                    PointView candidate) {
  const double log_f_current = target(current);
  if (log_f_current == kNegInf)
    throw Error(ErrorCode::InvalidArgument, "current state has zero target density");
  return ratio_given_current(log_f_current, target(candidate), jump, current, candidate);
}

StepResult mh_step(PointView current, const TargetDensity& target, const JumpKernel& jump, Rng& rng) {
  const double log_f_current = target(current);
  if (log_f_current == kNegInf)
    throw Error(ErrorCode::InvalidArgument, "current state has zero target density");
  auto step = step_cached(current, log_f_current, target, jump, rng);
  return {std::move(step.next), step.accepted};
}

Trace run_chain(const TargetDensity& target, const JumpKernel& jump, const Initializer& init,
                const RunOptions& options) {
  const std::size_t burn_in = options.burn_in.value_or(options.m / 10);
  if (options.m <= burn_in)
    throw Error(ErrorCode::InvalidArgument, "need m > burn_in (m = " + std::to_string(options.m) +
                                                ", burn_in = " + std::to_string(burn_in) + ")");
  if (options.thin == 0) throw Error(ErrorCode::InvalidArgument, "thin must be >= 1");

  Rng rng(options.seed);
  Point current;
  double log_f = kNegInf;
  if (const auto* point = std::get_if<Point>(&init)) {
    current = *point;
    log_f = target(current);
    if (log_f == kNegInf) throw Error(ErrorCode::InitFailure, "initial point has zero density");
  } else {
    const auto& sampler = std::get<InitSampler>(init);
    for (std::size_t attempt = 0; attempt < kInitRetries && log_f == kNegInf; ++attempt) {
      current = sampler(rng);
      log_f = target(current);
    }
    if (log_f == kNegInf)
      throw Error(ErrorCode::InitFailure,
                  "no positive-density start after " + std::to_string(kInitRetries) + " draws");
  }

  Trace trace;
  trace.seed = options.seed;
  trace.m = options.m;
  trace.burn_in = burn_in;
  trace.thin = options.thin;
  const std::size_t kept = (options.m - burn_in) / options.thin;
  trace.samples.reserve(kept);
  trace.iterations.reserve(kept);
  trace.accepted.reserve(kept);

  for (std::size_t t = 1; t <= options.m; ++t) {
    auto step = step_cached(current, log_f, target, jump, rng);
    ++trace.proposed_count;
    if (step.accepted) ++trace.accepted_count;
    current = std::move(step.next);
    log_f = step.log_f;
    if (t > burn_in && (t - burn_in - 1) % options.thin == 0 && trace.samples.size() < kept) {
      trace.samples.push_back(current);
      trace.iterations.push_back(t);
      trace.accepted.push_back(step.accepted);
    }
  }
  return trace;
}

FiniteChain finite_mh_kernel(std::span<const double> target_weights, const FiniteChain& jump) {
  const std::size_t n = jump.size();
  if (target_weights.size() != n)
    throw Error(ErrorCode::DimensionMismatch, std::to_string(target_weights.size()) +
                                                  " weights for a " + std::to_string(n) + "-state jump chain");
  for (std::size_t i = 0; i < n; ++i)
    if (!(target_weights[i] > 0.0) || !std::isfinite(target_weights[i]))
      throw Error(ErrorCode::ZeroWeight, "weight " + std::to_string(i) + " is not strictly positive");

  const auto idx = [](std::size_t i) { return static_cast<Eigen::Index>(i); };
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(idx(n), idx(n));
  for (std::size_t x = 0; x < n; ++x) {
    double off = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x || jump(x, y) <= 0.0) continue;
      const double ratio = (target_weights[y] * jump(y, x)) / (target_weights[x] * jump(x, y));
      p(idx(x), idx(y)) = jump(x, y) * std::min(1.0, ratio);
      off += p(idx(x), idx(y));
    }
    p(idx(x), idx(x)) = std::max(0.0, 1.0 - off);
  }
  FiniteChain kernel = validate_chain(p, jump.states());

  const double total = std::accumulate(target_weights.begin(), target_weights.end(), 0.0);
  std::vector<double> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = target_weights[i] / total;
  const double residual = detailed_balance_residual(kernel, ProbVector(jump.states(), std::move(pi)));
  if (residual > 1e-12)
    throw Error(ErrorCode::NumericalCheckFailed, "MH kernel detailed-balance residual " + io::format_double(residual));
  return kernel;
}

double acceptance_rate(const Trace& trace) {
  if (trace.proposed_count == 0) throw Error(ErrorCode::EmptyTrace, "no proposals recorded");
  return static_cast<double>(trace.accepted_count) / static_cast<double>(trace.proposed_count);
}

JumpKernel random_walk_kernel(double scale, std::size_t dimension) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw Error(ErrorCode::NonPositiveScale, "scale = " + io::format_double(scale));
  if (dimension == 0) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
  JumpKernel kernel;
  kernel.symmetric = true;
  kernel.sample = [scale](PointView current, Rng& rng) {
    Point candidate(current.begin(), current.end());
    for (auto& c : candidate) c += scale * rng.normal();
    return candidate;
  };
  const double log_norm = static_cast<double>(dimension) * std::log(scale * std::sqrt(2.0 * std::numbers::pi));
  kernel.log_density = [scale, log_norm](PointView to, PointView from) {
    double q = 0.0;
    for (std::size_t i = 0; i < to.size(); ++i) {
      const double z = (to[i] - from[i]) / scale;
      q += z * z;
    }
    return -0.5 * q - log_norm;
  };
  return kernel;
}

JumpKernel finite_jump_kernel(const FiniteChain& jump) {
  JumpKernel kernel;
  kernel.symmetric = jump.matrix() == jump.matrix().transpose();
  const std::size_t n = jump.size();
  std::vector<std::vector<double>> cumulative(n, std::vector<double>(n));
  for (std::size_t x = 0; x < n; ++x) {
    double acc = 0.0;
    for (std::size_t y = 0; y < n; ++y) cumulative[x][y] = (acc += jump(x, y));
  }
  kernel.sample = [cumulative = std::move(cumulative), n](PointView current, Rng& rng) {
    const auto& row = cumulative.at(static_cast<std::size_t>(current[0]));
    const double u = rng.uniform() * row.back();
    const auto it = std::upper_bound(row.begin(), row.end(), u);
    const auto y = std::min<std::size_t>(static_cast<std::size_t>(it - row.begin()), n - 1);
    return Point{static_cast<double>(y)};
  };
  kernel.log_density = [jump](PointView to, PointView from) {
    return std::log(jump(static_cast<std::size_t>(from[0]), static_cast<std::size_t>(to[0])));
  };
  return kernel;
}

TargetDensity finite_target(std::vector<double> weights) {
  TargetDensity target;
  target.dimension = 1;
  target.log_f = [weights = std::move(weights)](PointView x) {
    const double i = x[0];
    if (!(i >= 0.0) || i >= static_cast<double>(weights.size()) || i != std::floor(i)) return kNegInf;
    return std::log(weights[static_cast<std::size_t>(i)]);
  };
  return target;
}

double batch_means_standard_error(std::span<const double> series, std::size_t batches) {
  if (series.empty()) throw Error(ErrorCode::EmptyTrace, "empty series");
  batches = std::clamp<std::size_t>(batches, 2, std::max<std::size_t>(2, series.size()));
  const std::size_t size = series.size() / batches;
  if (size == 0) throw Error(ErrorCode::InvalidArgument, "series too short for batch means");
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const auto begin = series.begin() + static_cast<std::ptrdiff_t>(b * size);
    means[b] = std::accumulate(begin, begin + static_cast<std::ptrdiff_t>(size), 0.0) / static_cast<double>(size);
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(batches);
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  return std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "# seed=" << trace.seed << '\n'
      << "# m=" << trace.m << '\n'
      << "# burn_in=" << trace.burn_in << '\n'
      << "# thin=" << trace.thin << '\n'
      << "# acceptance_rate=" << io::format_double(acceptance_rate(trace)) << '\n';
  out << "iteration";
  for (std::size_t d = 1; d <= trace.dimension(); ++d) out << ",theta_" << d;
  out << ",accepted\n";
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    out << trace.iterations[i];
    for (double v : trace.samples[i]) out << ',' << io::format_double(v);
    out << ',' << (trace.accepted[i] ? 1 : 0) << '\n';
  }
}

}  // namespace mcmc
