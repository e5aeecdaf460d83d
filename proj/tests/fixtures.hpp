#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mcmc/chain.hpp"
#include "mcmc/rng.hpp"

namespace mcmc::testing {

// Positive vector summing to one, entries bounded away from zero.
inline std::vector<double> random_distribution(Rng& rng, std::size_t n) {
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& v : p) total += (v = 0.05 + rng.uniform());
  for (auto& v : p) v /= total;
  return p;
}

// Reversible chain with the given stationary law: symmetric conductances
// w(x, y) with P(x, y) = w(x, y) / pi(x), leftover mass on the diagonal.
inline FiniteChain reversible_chain(Rng& rng, const std::vector<double>& pi) {
  const auto n = static_cast<Eigen::Index>(pi.size());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = x + 1; y < n; ++y) w(x, y) = w(y, x) = rng.uniform();
  double worst = 0.0;
  for (Eigen::Index x = 0; x < n; ++x) worst = std::max(worst, w.row(x).sum() / pi[x]);
  Eigen::MatrixXd p(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) p(x, y) = w(x, y) / (pi[x] * worst * 1.25);
    p(x, x) = 0.0;
    p(x, x) = 1.0 - p.row(x).sum();
  }
  return validate_chain(p);
}

// Dense random chain with strictly positive entries: irreducible and aperiodic.
inline FiniteChain random_positive_chain(Rng& rng, std::size_t n) {
  Eigen::MatrixXd p(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index x = 0; x < p.rows(); ++x) {
    const auto row = random_distribution(rng, n);
    for (Eigen::Index y = 0; y < p.cols(); ++y) p(x, y) = row[static_cast<std::size_t>(y)];
  }
  return validate_chain(p);
}

// Random irreducible aperiodic chain with a sparse support: a directed cycle
// through every state, one self-loop, and a few random extra edges.
inline FiniteChain random_sparse_ergodic_chain(Rng& rng, std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index x = 0; x < m; ++x) {
    p(x, (x + 1) % m) = 0.2 + rng.uniform();
    if (rng.uniform() < 0.3) p(x, static_cast<Eigen::Index>(rng.index(n))) += rng.uniform();
  }
  p(0, 0) += 0.5;
  for (Eigen::Index x = 0; x < m; ++x) p.row(x) /= p.row(x).sum();
  return validate_chain(p);
}

}  // namespace mcmc::testing
