#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mcmc/chain.hpp"

namespace mcmc {

inline constexpr std::size_t kMixingScanCap = 1'000'000;
/// d(t) at or below this is rounding noise and counts as zero in envelope fits.
inline constexpr double kEnvelopeNoiseFloor = 1e-13;

/// Total variation distance sup_A |f(A) - g(A)|. On a finite space the
/// supremum is attained at A = {x : f(x) > g(x)}, which makes it equal to
/// half the L1 distance; that is what is computed.
double tv_distance(const ProbVector& f, const ProbVector& g);
double tv_distance(std::span<const double> f, std::span<const double> g);

/// Throws NotIrreducible or Periodic unless the chain is ergodic.
void require_ergodic(const FiniteChain& chain);

/// d(t) = max_x TV(P^t(x, .), pi) for t = 0..t_max. Starting rows are
/// propagated independently, so `threads` only changes the wall time.
std::vector<double> distance_curve(const FiniteChain& chain, std::size_t t_max,
                                   unsigned threads = 1);

double distance_to_stationarity(const FiniteChain& chain, std::size_t t);

/// Smallest t with d(t) < epsilon. Throws CapExceeded past `cap` steps.
std::size_t mixing_time(const FiniteChain& chain, double epsilon,
                        std::size_t cap = kMixingScanCap, unsigned threads = 1);

/// Geometric envelope d(t) <= C * alpha^t over an observed horizon.
struct Envelope {
  double C = 0.0;
  double alpha = 0.0;
  /// d(t) is numerically zero for every t >= 1 in the horizon; any alpha works and 0.5 is reported.
  bool trivial = false;
  /// d(k) == d(0) at some k, so alpha was fitted from a later anchor and C
  /// raised to cover the prefix.
  bool shifted_anchor = false;
};

/// Fits the smallest alpha with C = d(0): alpha = max_t (d(t)/d(0))^(1/t)
/// over 1 <= t <= t_max where d(t) > kEnvelopeNoiseFloor, so the bound
/// holds up to that floor. Requires t_max >= 2.
Envelope fit_geometric_envelope(const FiniteChain& chain, std::size_t t_max);
Envelope fit_geometric_envelope(std::span<const double> curve);

struct MixingReport {
  std::vector<std::pair<std::size_t, double>> d_curve;
  std::size_t t_mix = 0;
  Envelope envelope;
};

/// Curve up to min(t_max, t_mix), the mixing time for epsilon, and the
/// envelope fitted over t_max.
MixingReport mixing_report(const FiniteChain& chain, double epsilon, std::size_t t_max,
                           unsigned threads = 1);

}  // namespace mcmc
