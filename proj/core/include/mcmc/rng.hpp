#pragma once

#include <cstdint>
#include <random>

namespace mcmc {

/// Seedable generator used by every sampler in the library.
///
/// Stream definition (pinned; changing any of it changes every trace):
///   - engine: std::mt19937_64 seeded with the 64-bit seed directly;
///   - uniform(): top 53 bits of one engine draw times 2^-53, in [0, 1);
///   - normal(): Box-Muller on two uniform() draws, no cached second variate;
///   - index(n): one engine draw reduced by 128-bit multiply-shift.
/// The engine is specified bit-exactly by the C++ standard, so streams are
/// reproducible across standard libraries. Reproducibility across other
/// implementations of this toolkit is not promised.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double normal();
  std::size_t index(std::size_t n);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return next(); }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; derives independent stream seeds from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

inline constexpr std::uint64_t kDefaultSeed = 20240611ULL;

}  // namespace mcmc
