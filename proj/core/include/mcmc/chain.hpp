#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace mcmc {

inline constexpr double kRowSumTolerance = 1e-9;
inline constexpr double kFixedPointTolerance = 1e-10;
inline constexpr double kReversibilityTolerance = 1e-10;
inline constexpr std::size_t kMaxStates = 10'000;

/// Row-stochastic transition matrix over an explicit, ordered set of state
/// labels. Only obtainable through validate_chain(), so every instance
/// satisfies: n >= 1, unique labels, entries in [0, 1], rows summing to 1.
class FiniteChain {
 public:
  std::size_t size() const noexcept { return states_.size(); }
  const std::vector<std::string>& states() const noexcept { return states_; }
  const std::string& state(std::size_t i) const { return states_.at(i); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  double operator()(std::size_t from, std::size_t to) const {
    return matrix_(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to));
  }

  /// Position of a label; throws UnknownState.
  std::size_t index_of(std::string_view label) const;

  friend bool operator==(const FiniteChain&, const FiniteChain&) = default;

 private:
  friend FiniteChain validate_chain(const Eigen::MatrixXd&, std::vector<std::string>);
  FiniteChain(std::vector<std::string> states, Eigen::MatrixXd matrix)
      : states_(std::move(states)), matrix_(std::move(matrix)) {}

  std::vector<std::string> states_;
  Eigen::MatrixXd matrix_;
};

/// Probability distribution over a labelled finite state set.
class ProbVector {
 public:
  /// Validates nonnegativity and unit sum (within kRowSumTolerance), then
  /// renormalizes exactly.
  ProbVector(std::vector<std::string> states, std::vector<double> probs);

  static ProbVector point_mass(std::vector<std::string> states, std::size_t at);
  static ProbVector uniform(std::vector<std::string> states);

  std::size_t size() const noexcept { return probs_.size(); }
  const std::vector<std::string>& states() const noexcept { return states_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }

 private:
  ProbVector() = default;
  std::vector<std::string> states_;
  std::vector<double> probs_;
};

/// Builds a FiniteChain. An empty label list means "0", "1", ... "n-1".
/// Rows within kRowSumTolerance of 1 are rescaled to sum to 1.
/// Throws NonSquare, NegativeEntry, RowSumViolation, DuplicateLabel,
/// DimensionMismatch.
FiniteChain validate_chain(const Eigen::MatrixXd& raw, std::vector<std::string> labels = {});
FiniteChain validate_chain(const std::vector<std::vector<double>>& raw,
                           std::vector<std::string> labels = {});

/// Strong connectivity of the support digraph (edge x->y iff P(x,y) > 0).
bool is_irreducible(const FiniteChain& chain);

/// gcd of the return times of a state, read off the support digraph by BFS
/// level labelling inside the state's strongly connected component.
/// Throws NoReturnPath when the state can never return to itself.
std::size_t period(const FiniteChain& chain, std::size_t state);
std::size_t period(const FiniteChain& chain, std::string_view label);

/// Period of every state, with 0 for states that never return.
std::vector<std::size_t> state_periods(const FiniteChain& chain);
/// True iff every state has period 1. Throws NoReturnPath if any state has
/// no return path.
bool is_aperiodic(const FiniteChain& chain);

enum class StationaryMethod { Auto, DirectSolve, PowerIteration };

struct StationaryOptions {
  StationaryMethod method = StationaryMethod::Auto;
  std::size_t direct_limit = 512;        // Auto uses the dense solve up to this n
  double power_tolerance = 1e-12;        // sup-norm change between iterates
  std::size_t power_max_iterations = 1'000'000;
};

/// Unique pi with pi = pi P. Throws NotIrreducible or PowerIterationDiverged.
ProbVector stationary_distribution(const FiniteChain& chain, const StationaryOptions& options = {});

/// max_{x,y} |pi(x) P(x,y) - pi(y) P(y,x)|.
double detailed_balance_residual(const FiniteChain& chain, const ProbVector& dist);
bool is_reversible(const FiniteChain& chain, const ProbVector& dist,
                   double tolerance = kReversibilityTolerance);

/// max_y |(pi P)(y) - pi(y)|.
double fixed_point_residual(const FiniteChain& chain, const ProbVector& dist);

enum class StepMethod { Iterated, Squaring };

/// start * P^t. Entries below zero by at most 1e-12 are clamped to zero.
ProbVector step_distribution(const FiniteChain& chain, const ProbVector& start, std::size_t t,
                             StepMethod method = StepMethod::Iterated);

/// P^t by repeated squaring.
Eigen::MatrixXd matrix_power(const FiniteChain& chain, std::size_t t);

}  // namespace mcmc
