#include "mcmc/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "mcmc/errors.hpp"

namespace mcmc {
namespace {

using Index = Eigen::Index;
using Adjacency = std::vector<std::vector<std::size_t>>;

std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return labels;
}

Adjacency support_graph(const FiniteChain& chain, bool reversed = false) {
  const std::size_t n = chain.size();
  Adjacency adj(n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (chain(x, y) > 0.0) (reversed ? adj[y] : adj[x]).push_back(reversed ? x : y);
  return adj;
}

std::vector<bool> reachable_from(const Adjacency& adj, std::size_t source) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<std::size_t> stack{source};
  seen[source] = true;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto v : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
  }
  return seen;
}

void require_same_dimension(const FiniteChain& chain, const ProbVector& dist) {
  if (chain.size() != dist.size())
    throw Error(ErrorCode::DimensionMismatch, "chain has " + std::to_string(chain.size()) +
                                                  " states, distribution has " +
                                                  std::to_string(dist.size()));
}

std::vector<double> clamp_and_normalize(Eigen::VectorXd v) {
  std::vector<double> out(static_cast<std::size_t>(v.size()));
  double total = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    double p = v(i);
    if (p < 0.0) p = 0.0;
    out[static_cast<std::size_t>(i)] = p;
    total += p;
  }
  for (auto& p : out) p /= total;
  return out;
}

std::optional<Eigen::VectorXd> solve_direct(const FiniteChain& chain) {
  const auto n = static_cast<Index>(chain.size());
  Eigen::MatrixXd a = chain.matrix().transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::VectorXd pi = a.partialPivLu().solve(b);
  if (!pi.allFinite()) return std::nullopt;
  return pi;
}

Eigen::VectorXd solve_power(const FiniteChain& chain, const StationaryOptions& options) {
  // Iterate the lazy chain (P + I) / 2: same stationary distribution, and
  // aperiodic, so the iteration converges on periodic irreducible inputs too.
  const std::size_t n = chain.size();
  struct Entry {
    std::size_t to;
    double p;
  };
  std::vector<std::vector<Entry>> rows(n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (chain(x, y) > 0.0) rows[x].push_back({y, chain(x, y)});

  std::vector<double> cur(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  for (std::size_t it = 1; it <= options.power_max_iterations; ++it) {
    for (std::size_t y = 0; y < n; ++y) next[y] = 0.5 * cur[y];
    for (std::size_t x = 0; x < n; ++x)
      for (const auto& e : rows[x]) next[e.to] += 0.5 * cur[x] * e.p;
    const double total = std::accumulate(next.begin(), next.end(), 0.0);
    double change = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      next[y] /= total;
      change = std::max(change, std::abs(next[y] - cur[y]));
    }
    cur.swap(next);
    if (change < options.power_tolerance) {
      return Eigen::Map<Eigen::VectorXd>(cur.data(), static_cast<Index>(n));
    }
  }
  throw Error(ErrorCode::PowerIterationDiverged,
              "no convergence after " + std::to_string(options.power_max_iterations) +
                  " iterations");
}

}  // namespace

std::size_t FiniteChain::index_of(std::string_view label) const {
  const auto it = std::find(states_.begin(), states_.end(), label);
  if (it == states_.end()) throw Error(ErrorCode::UnknownState, std::string(label));
  return static_cast<std::size_t>(it - states_.begin());
}

ProbVector::ProbVector(std::vector<std::string> states, std::vector<double> probs)
    : states_(std::move(states)), probs_(std::move(probs)) {
  if (states_.size() != probs_.size())
    throw Error(ErrorCode::DimensionMismatch, std::to_string(states_.size()) + " labels for " +
                                                  std::to_string(probs_.size()) +
                                                  " probabilities");
  if (probs_.empty()) throw Error(ErrorCode::InvalidArgument, "empty distribution");
  double total = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (!(probs_[i] >= 0.0) || !std::isfinite(probs_[i]))
      throw Error(ErrorCode::NegativeEntry,
                  "probability " + std::to_string(i) + " = " + describe(probs_[i]));
    total += probs_[i];
  }
  if (std::abs(total - 1.0) > kRowSumTolerance)
    throw Error(ErrorCode::RowSumViolation, "distribution sums to " + describe(total));
  if (std::abs(total - 1.0) > 1e-14 * static_cast<double>(probs_.size()))
    for (auto& p : probs_) p /= total;
}

ProbVector ProbVector::point_mass(std::vector<std::string> states, std::size_t at) {
  std::vector<double> probs(states.size(), 0.0);
  probs.at(at) = 1.0;
  return ProbVector(std::move(states), std::move(probs));
}

ProbVector ProbVector::uniform(std::vector<std::string> states) {
  std::vector<double> probs(states.size(), 1.0 / static_cast<double>(states.size()));
  return ProbVector(std::move(states), std::move(probs));
}

FiniteChain validate_chain(const Eigen::MatrixXd& raw, std::vector<std::string> labels) {
  if (raw.rows() != raw.cols())
    throw Error(ErrorCode::NonSquare, std::to_string(raw.rows()) + "x" + std::to_string(raw.cols()));
  const auto n = static_cast<std::size_t>(raw.rows());
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "chain needs at least one state");
  if (n > kMaxStates)
    throw Error(ErrorCode::InvalidArgument,
                std::to_string(n) + " states exceeds the limit of " + std::to_string(kMaxStates));
  if (labels.empty()) labels = default_labels(n);
  if (labels.size() != n)
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(labels.size()) + " labels for " + std::to_string(n) + " states");
  std::unordered_set<std::string> seen;
  for (const auto& l : labels)
    if (!seen.insert(l).second) throw Error(ErrorCode::DuplicateLabel, l);

  Eigen::MatrixXd m = raw;
  for (Index r = 0; r < m.rows(); ++r) {
    double sum = 0.0;
    for (Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      if (!(v >= 0.0) || !std::isfinite(v))
        throw Error(ErrorCode::NegativeEntry, "entry (" + std::to_string(r) + ", " +
                                                  std::to_string(c) + ") = " + describe(v));
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance)
      throw Error(ErrorCode::RowSumViolation,
                  "row " + std::to_string(r) + " sums to " + describe(sum));
    // Rows already at rounding level are left alone so that validating an
    // already-valid matrix is the identity.
    if (std::abs(sum - 1.0) > 1e-14 * static_cast<double>(n)) m.row(r) /= sum;
  }
  return FiniteChain(std::move(labels), std::move(m));
}

FiniteChain validate_chain(const std::vector<std::vector<double>>& raw,
                           std::vector<std::string> labels) {
  const auto n = static_cast<Index>(raw.size());
  for (const auto& row : raw)
    if (static_cast<Index>(row.size()) != n)
      throw Error(ErrorCode::NonSquare, "row of length " + std::to_string(row.size()) +
                                            " in a matrix with " + std::to_string(n) + " rows");
  Eigen::MatrixXd m(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) m(r, c) = raw[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return validate_chain(m, std::move(labels));
}

bool is_irreducible(const FiniteChain& chain) {
  const auto forward = reachable_from(support_graph(chain), 0);
  const auto backward = reachable_from(support_graph(chain, true), 0);
  return std::all_of(forward.begin(), forward.end(), [](bool b) { return b; }) &&
         std::all_of(backward.begin(), backward.end(), [](bool b) { return b; });
}

namespace {

// Period of `state` and the members of its strongly connected component.
// BFS levels inside the component; every edge u->v inside it closes a
// cycle-length discrepancy level[u] + 1 - level[v], and the period is the
// gcd of those discrepancies. 0 means the state never returns.
std::size_t component_period(const Adjacency& adj, const Adjacency& reversed, std::size_t state,
                             std::vector<bool>& in_component) {
  const auto fwd = reachable_from(adj, state);
  const auto bwd = reachable_from(reversed, state);
  const std::size_t n = adj.size();
  for (std::size_t v = 0; v < n; ++v) in_component[v] = fwd[v] && bwd[v];

  std::vector<std::ptrdiff_t> level(n, -1);
  std::queue<std::size_t> queue;
  level[state] = 0;
  queue.push(state);
  std::size_t g = 0;
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop();
    for (auto v : adj[u]) {
      if (!in_component[v]) continue;
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push(v);
      } else {
        g = std::gcd(g, static_cast<std::size_t>(std::abs(level[u] + 1 - level[v])));
      }
    }
  }
  return g;
}

}  // namespace

std::size_t period(const FiniteChain& chain, std::size_t state) {
  if (state >= chain.size()) throw Error(ErrorCode::UnknownState, "index " + std::to_string(state));
  std::vector<bool> in_component(chain.size());
  const auto g = component_period(support_graph(chain), support_graph(chain, true), state, in_component);
  if (g == 0)
    throw Error(ErrorCode::NoReturnPath, "state '" + chain.state(state) + "' never returns");
  return g;
}

std::size_t period(const FiniteChain& chain, std::string_view label) {
  return period(chain, chain.index_of(label));
}

std::vector<std::size_t> state_periods(const FiniteChain& chain) {
  const auto adj = support_graph(chain);
  const auto reversed = support_graph(chain, true);
  const std::size_t n = chain.size();
  std::vector<std::size_t> periods(n, 0);
  std::vector<bool> done(n, false);
  std::vector<bool> in_component(n);
  // Period is shared by a whole communicating class, so one BFS per class.
  for (std::size_t x = 0; x < n; ++x) {
    if (done[x]) continue;
    const auto g = component_period(adj, reversed, x, in_component);
    for (std::size_t v = 0; v < n; ++v)
      if (in_component[v]) {
        periods[v] = g;
        done[v] = true;
      }
  }
  return periods;
}

bool is_aperiodic(const FiniteChain& chain) {
  const auto periods = state_periods(chain);
  for (std::size_t x = 0; x < periods.size(); ++x)
    if (periods[x] == 0)
      throw Error(ErrorCode::NoReturnPath, "state '" + chain.state(x) + "' never returns");
  return std::all_of(periods.begin(), periods.end(), [](std::size_t p) { return p == 1; });
}

ProbVector stationary_distribution(const FiniteChain& chain, const StationaryOptions& options) {
  if (!is_irreducible(chain))
    throw Error(ErrorCode::NotIrreducible, "stationary distribution is not unique");
  const bool direct = options.method == StationaryMethod::DirectSolve ||
                      (options.method == StationaryMethod::Auto && chain.size() <= options.direct_limit);
  if (direct) {
    if (auto pi = solve_direct(chain)) {
      ProbVector result(chain.states(), clamp_and_normalize(*pi));
      if (fixed_point_residual(chain, result) <= kFixedPointTolerance) return result;
    }
    if (options.method == StationaryMethod::DirectSolve)
      throw Error(ErrorCode::PowerIterationDiverged, "direct solve missed the fixed-point tolerance");
  }
  ProbVector result(chain.states(), clamp_and_normalize(solve_power(chain, options)));
  if (fixed_point_residual(chain, result) > kFixedPointTolerance)
    throw Error(ErrorCode::PowerIterationDiverged,
                "fixed-point residual " + describe(fixed_point_residual(chain, result)));
  return result;
}

double detailed_balance_residual(const FiniteChain& chain, const ProbVector& dist) {
  require_same_dimension(chain, dist);
  double worst = 0.0;
  for (std::size_t x = 0; x < chain.size(); ++x)
    for (std::size_t y = x + 1; y < chain.size(); ++y)
      worst = std::max(worst, std::abs(dist[x] * chain(x, y) - dist[y] * chain(y, x)));
  return worst;
}

bool is_reversible(const FiniteChain& chain, const ProbVector& dist, double tolerance) {
  return detailed_balance_residual(chain, dist) <= tolerance;
}

double fixed_point_residual(const FiniteChain& chain, const ProbVector& dist) {
  require_same_dimension(chain, dist);
  const auto n = static_cast<Index>(chain.size());
  const Eigen::Map<const Eigen::RowVectorXd> pi(dist.probs().data(), n);
  return (pi * chain.matrix() - pi).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd matrix_power(const FiniteChain& chain, std::size_t t) {
  const auto n = static_cast<Index>(chain.size());
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd base = chain.matrix();
  while (t > 0) {
    if (t & 1U) result = result * base;
    t >>= 1U;
    if (t > 0) base = base * base;
  }
  return result;
}

ProbVector step_distribution(const FiniteChain& chain, const ProbVector& start, std::size_t t,
                             StepMethod method) {
  require_same_dimension(chain, start);
  const auto n = static_cast<Index>(chain.size());
  Eigen::RowVectorXd v = Eigen::Map<const Eigen::RowVectorXd>(start.probs().data(), n);
  if (method == StepMethod::Squaring) {
    v = v * matrix_power(chain, t);
  } else {
    for (std::size_t s = 0; s < t; ++s) v = v * chain.matrix();
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double p = v(i);
    if (p < -1e-12)
      throw Error(ErrorCode::InvalidArgument, "negative mass " + describe(p) + " after stepping");
    out[static_cast<std::size_t>(i)] = std::max(p, 0.0);
  }
  return ProbVector(chain.states(), std::move(out));
}

}  // namespace mcmc
