#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcmc/io.hpp"
#include "mcmc/mh.hpp"

namespace mcmc {

/// Observations: a flat list of reals, or a successes/trials pair for
/// binomial models.
struct Dataset {
  std::vector<double> x;
  std::optional<io::BinomialCounts> binomial;

  bool empty() const { return x.empty() && (!binomial || binomial->trials == 0); }
};

/// Axis-aligned parameter space. Bounds may be infinite; `open` excludes them.
struct ParameterBox {
  Point lower;
  Point upper;
  bool open = true;

  std::size_t dimension() const { return lower.size(); }
  bool contains(PointView theta) const;
};

struct BayesModel {
  std::string name;
  /// log prod_i f(X_i | theta); must be 0 on an empty dataset.
  std::function<double(PointView theta, const Dataset& data)> log_likelihood;
  std::function<double(PointView theta)> log_prior;
  ParameterBox space;
  /// Scalar grid with the given step covering the plausible posterior range.
  std::function<std::vector<double>(const Dataset& data, double step)> suggest_grid;
};

/// Beta(a, b) prior on a success probability with a binomial likelihood
/// (including the log binomial coefficient). Without a binomial pair the x
/// values are read as 0/1 Bernoulli outcomes.
BayesModel beta_binomial_model(double prior_a = 1.0, double prior_b = 1.0);

/// Normal likelihood with known standard deviation `sigma` on the mean,
/// with a Normal(prior_mean, prior_sd^2) prior.
BayesModel normal_known_variance_model(double sigma = 1.0, double prior_mean = 0.0,
                                       double prior_sd = 10.0);

/// Closed-form conjugate posteriors, used as oracles.
struct PosteriorSummary {
  double mean = 0.0;
  double mode = 0.0;
  double variance = 0.0;
};
PosteriorSummary beta_binomial_posterior(double prior_a, double prior_b, std::int64_t successes,
                                         std::int64_t trials);
PosteriorSummary normal_known_variance_posterior(double sigma, double prior_mean, double prior_sd,
                                                 const std::vector<double>& x);

/// log P(X | theta) + log P(theta). Throws OutOfDomain.
double log_posterior_unnorm(const BayesModel& model, PointView theta, const Dataset& data);

/// Grid argmax of the log-likelihood; ties go to the smallest index.
/// Throws EmptyGrid, OutOfDomain, AllDegenerate.
Point mle_estimate(const BayesModel& model, const Dataset& data, const std::vector<Point>& grid);

/// Grid argmax of the unnormalized log-posterior; same tie rule.
Point map_estimate(const BayesModel& model, const Dataset& data, const std::vector<Point>& grid);

/// Evenly spaced values lower, lower + step, ... up to upper (inclusive
/// within half a step).
std::vector<double> uniform_grid(double lower, double upper, double step);
std::vector<Point> as_points(const std::vector<double>& grid);

/// The model's suggested grid: [step, 1 - step] for beta-binomial, the data
/// range widened by 4 sigma for the normal model.
std::vector<double> default_grid(const BayesModel& model, const Dataset& data, double step);

/// Normalized posterior masses on a scalar grid.
class PosteriorGrid {
 public:
  /// Throws NonNormalizedPosterior unless weights sum to 1 within 1e-9.
  PosteriorGrid(std::vector<double> points, std::vector<double> weights);

  const std::vector<double>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return points_.size(); }

  double mean() const;
  double variance() const;
  /// Index of the largest weight (smallest index on ties).
  std::size_t mode_index() const;

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
};

/// Weights proportional to exp(log-likelihood + log-prior) on the grid.
PosteriorGrid posterior_grid(const BayesModel& model, const Dataset& data, const std::vector<double>& grid);

struct PosteriorMean {
  double estimate = 0.0;
  std::optional<double> exact;
};

/// Ergodic average of g over the trace; with a grid, also the exact sum of
/// g times the grid weights. Throws EmptyTrace.
PosteriorMean posterior_mean(const Trace& trace, const std::function<double(PointView)>& g,
                             const std::optional<PosteriorGrid>& exact = std::nullopt);

class Loss {
 public:
  enum class Kind { Squared, ZeroOne };

  static Loss squared() { return Loss(Kind::Squared, 0.0); }
  /// 1 - P(|theta - decision| < epsilon); the finite-epsilon stand-in for the
  /// limiting 0-1 loss.
  static Loss zero_one(double epsilon);
  /// "squared" or "zero_one"; throws UnknownLoss.
  static Loss parse(std::string_view name, double epsilon = 0.0);

  Kind kind() const noexcept { return kind_; }
  double epsilon() const noexcept { return epsilon_; }

 private:
  Loss(Kind kind, double epsilon) : kind_(kind), epsilon_(epsilon) {}
  Kind kind_;
  double epsilon_;
};

/// Expected posterior loss of `decision` under the grid posterior.
double risk(const Loss& loss, double decision, const PosteriorGrid& posterior);

}  // namespace mcmc
