#include "mcmc/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "mcmc/errors.hpp"

namespace mcmc {
namespace {

/// Propagates every point-mass start through a sparse copy of P and tracks
/// the worst-case TV distance to pi.
class DistanceScanner {
 public:
  DistanceScanner(const FiniteChain& chain, unsigned threads)
      : n_(chain.size()), threads_(std::max(1U, threads)), rows_(n_ * n_, 0.0), next_(n_ * n_) {
    pi_ = stationary_distribution(chain).probs();
    for (std::size_t x = 0; x < n_; ++x) {
      rows_[x * n_ + x] = 1.0;
      for (std::size_t y = 0; y < n_; ++y)
        if (chain(x, y) > 0.0) csr_.push_back({x, y, chain(x, y)});
    }
  }

  double distance() const {
    double worst = 0.0;
    for (std::size_t x = 0; x < n_; ++x)
      worst = std::max(worst, tv_distance(std::span(rows_).subspan(x * n_, n_), pi_));
    return worst;
  }

  void advance() {
    auto work = [this](std::size_t begin, std::size_t end) {
      for (std::size_t s = begin; s < end; ++s) {
        const double* cur = rows_.data() + s * n_;
        double* out = next_.data() + s * n_;
        std::fill(out, out + n_, 0.0);
        for (const auto& e : csr_) out[e.to] += cur[e.from] * e.p;
      }
    };
    if (threads_ == 1 || n_ < 64) {
      work(0, n_);
    } else {
      std::vector<std::jthread> pool;
      const std::size_t chunk = (n_ + threads_ - 1) / threads_;
      for (std::size_t begin = 0; begin < n_; begin += chunk)
        pool.emplace_back(work, begin, std::min(n_, begin + chunk));
    }
    rows_.swap(next_);
  }

 private:
  struct Entry {
    std::size_t from;
    std::size_t to;
    double p;
  };
  std::size_t n_;
  unsigned threads_;
  std::vector<double> pi_;
  std::vector<Entry> csr_;
  std::vector<double> rows_;
  std::vector<double> next_;
};

}  // namespace

double tv_distance(std::span<const double> f, std::span<const double> g) {
  if (f.size() != g.size())
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(f.size()) + " vs " + std::to_string(g.size()) + " states");
  double l1 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) l1 += std::abs(f[i] - g[i]);
  return std::min(1.0, 0.5 * l1);
}

double tv_distance(const ProbVector& f, const ProbVector& g) {
  if (f.states() != g.states())
    throw Error(ErrorCode::DimensionMismatch, "distributions are over different state sets");
  return tv_distance(f.probs(), g.probs());
}

void require_ergodic(const FiniteChain& chain) {
  if (!is_irreducible(chain)) throw Error(ErrorCode::NotIrreducible, "chain is not irreducible");
  if (!is_aperiodic(chain)) throw Error(ErrorCode::Periodic, "chain is periodic");
}

std::vector<double> distance_curve(const FiniteChain& chain, std::size_t t_max, unsigned threads) {
  require_ergodic(chain);
  DistanceScanner scanner(chain, threads);
  std::vector<double> curve;
  curve.reserve(t_max + 1);
  curve.push_back(scanner.distance());
  for (std::size_t t = 1; t <= t_max; ++t) {
    scanner.advance();
    curve.push_back(scanner.distance());
  }
  return curve;
}

double distance_to_stationarity(const FiniteChain& chain, std::size_t t) {
  return distance_curve(chain, t).back();
}

std::size_t mixing_time(const FiniteChain& chain, double epsilon, std::size_t cap, unsigned threads) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1)");
  require_ergodic(chain);
  DistanceScanner scanner(chain, threads);
  for (std::size_t t = 0; t <= cap; ++t) {
    if (scanner.distance() < epsilon) return t;
    scanner.advance();
  }
  throw Error(ErrorCode::CapExceeded, "d(t) >= epsilon for every t <= " + std::to_string(cap));
}

Envelope fit_geometric_envelope(std::span<const double> curve) {
  if (curve.size() < 3) throw Error(ErrorCode::InvalidArgument, "envelope needs t_max >= 2");
  Envelope env;
  env.C = curve[0];
  // Rows of P^t settle onto pi only up to rounding, so d(t) levels off near
  // 1e-16 instead of reaching zero. Values at that floor carry no decay
  // information and are treated as zero.
  const auto zero = [](double d) { return d <= kEnvelopeNoiseFloor; };
  const bool all_zero = std::all_of(curve.begin() + 1, curve.end(), zero);
  if (all_zero || curve[0] <= 0.0) {
    env.trivial = true;
    env.alpha = 0.5;
    return env;
  }
  // Anchor k = 0 is the plain fit. A later anchor is only needed when the
  // curve is flat at the start, which leaves alpha = 1.
  for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
    if (zero(curve[k])) break;
    double alpha = 0.0;
    for (std::size_t t = k + 1; t < curve.size(); ++t)
      if (!zero(curve[t]))
        alpha = std::max(alpha, std::pow(curve[t] / curve[k], 1.0 / static_cast<double>(t - k)));
    if (alpha <= 0.0 || alpha >= 1.0) continue;
    env.alpha = alpha;
    env.shifted_anchor = k > 0;
    for (std::size_t s = 1; s <= k; ++s)
      env.C = std::max(env.C, curve[s] / std::pow(alpha, static_cast<double>(s)));
    return env;
  }
  throw Error(ErrorCode::CapExceeded, "d(t) does not decay over the horizon");
}

Envelope fit_geometric_envelope(const FiniteChain& chain, std::size_t t_max) {
  if (t_max < 2) throw Error(ErrorCode::InvalidArgument, "envelope needs t_max >= 2");
  return fit_geometric_envelope(distance_curve(chain, t_max));
}

MixingReport mixing_report(const FiniteChain& chain, double epsilon, std::size_t t_max, unsigned threads) {
  MixingReport report;
  report.t_mix = mixing_time(chain, epsilon, kMixingScanCap, threads);
  const auto curve = distance_curve(chain, std::max<std::size_t>(t_max, 2), threads);
  const std::size_t last = std::min(t_max, report.t_mix);
  for (std::size_t t = 0; t <= last; ++t) report.d_curve.emplace_back(t, curve[t]);
  report.envelope = fit_geometric_envelope(curve);
  return report;
}

}  // namespace mcmc
