#include "mcmc/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "mcmc/errors.hpp"

namespace mcmc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

double log_choose(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double log_normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

void require_in_domain(const BayesModel& model, PointView theta) {
  if (!model.space.contains(theta)) {
    std::string text = "(";
    for (std::size_t i = 0; i < theta.size(); ++i) text += (i ? ", " : "") + io::format_double(theta[i]);
    throw Error(ErrorCode::OutOfDomain, text + ") is outside the parameter space of " + model.name);
  }
}

template <typename Objective>
Point grid_argmax(const BayesModel& model, const std::vector<Point>& grid, Objective objective) {
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "grid has no points");
  std::size_t best = grid.size();
  double best_value = kNegInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require_in_domain(model, grid[i]);
    const double v = objective(grid[i]);
    if (std::isnan(v)) throw Error(ErrorCode::NaNDensity, "objective is NaN at grid index " + std::to_string(i));
    if (v > best_value) {  // strict: the earliest maximizer wins ties
      best_value = v;
      best = i;
    }
  }
  if (best == grid.size()) throw Error(ErrorCode::AllDegenerate, "objective is -inf on the whole grid");
  return grid[best];
}

}  // namespace

bool ParameterBox::contains(PointView theta) const {
  if (theta.size() != lower.size()) return false;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double v = theta[i];
    if (std::isnan(v)) return false;
    if (open ? !(v > lower[i] && v < upper[i]) : !(v >= lower[i] && v <= upper[i])) return false;
  }
  return true;
}

BayesModel beta_binomial_model(double prior_a, double prior_b) {
  if (!(prior_a > 0.0) || !(prior_b > 0.0))
    throw Error(ErrorCode::InvalidArgument, "beta prior parameters must be positive");
  BayesModel model;
  model.name = "beta-binomial";
  model.space = ParameterBox{{0.0}, {1.0}, true};
  model.log_likelihood = [](PointView theta, const Dataset& data) {
    const double p = theta[0];
    double ll = 0.0;
    if (data.binomial) {
      const auto k = data.binomial->successes;
      const auto n = data.binomial->trials;
      if (n > 0)
        ll += log_choose(n, k) + static_cast<double>(k) * std::log(p) +
              static_cast<double>(n - k) * std::log1p(-p);
    }
    for (double x : data.x) ll += x != 0.0 ? std::log(p) : std::log1p(-p);
    return ll;
  };
  const double log_norm = log_beta_fn(prior_a, prior_b);
  model.log_prior = [prior_a, prior_b, log_norm](PointView theta) {
    const double p = theta[0];
    return (prior_a - 1.0) * std::log(p) + (prior_b - 1.0) * std::log1p(-p) - log_norm;
  };
  model.suggest_grid = [](const Dataset&, double step) {
    if (!(step > 0.0 && step < 0.5)) throw Error(ErrorCode::InvalidArgument, "grid step must lie in (0, 0.5)");
    return uniform_grid(step, 1.0 - step, step);
  };
  return model;
}

BayesModel normal_known_variance_model(double sigma, double prior_mean, double prior_sd) {
  if (!(sigma > 0.0) || !(prior_sd > 0.0))
    throw Error(ErrorCode::InvalidArgument, "standard deviations must be positive");
  BayesModel model;
  model.name = "normal";
  model.space = ParameterBox{{-kInf}, {kInf}, true};
  model.log_likelihood = [sigma](PointView theta, const Dataset& data) {
    double ll = 0.0;
    for (double x : data.x) ll += log_normal_pdf(x, theta[0], sigma);
    return ll;
  };
  model.log_prior = [prior_mean, prior_sd](PointView theta) {
    return log_normal_pdf(theta[0], prior_mean, prior_sd);
  };
  model.suggest_grid = [sigma, prior_mean, prior_sd](const Dataset& data, double step) {
    if (data.x.empty()) return uniform_grid(prior_mean - 4.0 * prior_sd, prior_mean + 4.0 * prior_sd, step);
    const auto [lo, hi] = std::minmax_element(data.x.begin(), data.x.end());
    return uniform_grid(*lo - 4.0 * sigma, *hi + 4.0 * sigma, step);
  };
  return model;
}

PosteriorSummary beta_binomial_posterior(double prior_a, double prior_b, std::int64_t successes,
                                         std::int64_t trials) {
  const double a = prior_a + static_cast<double>(successes);
  const double b = prior_b + static_cast<double>(trials - successes);
  PosteriorSummary s;
  s.mean = a / (a + b);
  s.mode = (a > 1.0 && b > 1.0) ? (a - 1.0) / (a + b - 2.0) : std::numeric_limits<double>::quiet_NaN();
  s.variance = a * b / ((a + b) * (a + b) * (a + b + 1.0));
  return s;
}

PosteriorSummary normal_known_variance_posterior(double sigma, double prior_mean, double prior_sd,
                                                 const std::vector<double>& x) {
  const double precision = 1.0 / (prior_sd * prior_sd) + static_cast<double>(x.size()) / (sigma * sigma);
  const double sum = std::accumulate(x.begin(), x.end(), 0.0);
  PosteriorSummary s;
  s.mean = (prior_mean / (prior_sd * prior_sd) + sum / (sigma * sigma)) / precision;
  s.mode = s.mean;
  s.variance = 1.0 / precision;
  return s;
}

double log_posterior_unnorm(const BayesModel& model, PointView theta, const Dataset& data) {
  require_in_domain(model, theta);
  return model.log_likelihood(theta, data) + model.log_prior(theta);
}

Point mle_estimate(const BayesModel& model, const Dataset& data, const std::vector<Point>& grid) {
  return grid_argmax(model, grid, [&](PointView theta) { return model.log_likelihood(theta, data); });
}

Point map_estimate(const BayesModel& model, const Dataset& data, const std::vector<Point>& grid) {
  return grid_argmax(model, grid, [&](PointView theta) {
    return model.log_likelihood(theta, data) + model.log_prior(theta);
  });
}

std::vector<double> uniform_grid(double lower, double upper, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw Error(ErrorCode::InvalidArgument, "grid step must be positive");
  if (!(upper >= lower)) throw Error(ErrorCode::InvalidArgument, "grid upper bound below lower bound");
  const auto count = static_cast<std::size_t>(std::floor((upper - lower) / step + 0.5)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lower + static_cast<double>(i) * step;
  return grid;
}

std::vector<Point> as_points(const std::vector<double>& grid) {
  std::vector<Point> points;
  points.reserve(grid.size());
  for (double v : grid) points.push_back(Point{v});
  return points;
}

std::vector<double> default_grid(const BayesModel& model, const Dataset& data, double step) {
  if (!model.suggest_grid) throw Error(ErrorCode::InvalidArgument, model.name + " has no default grid");
  return model.suggest_grid(data, step);
}

PosteriorGrid::PosteriorGrid(std::vector<double> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty()) throw Error(ErrorCode::EmptyGrid, "posterior grid has no points");
  if (points_.size() != weights_.size())
    throw Error(ErrorCode::DimensionMismatch, "points and weights differ in length");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw Error(ErrorCode::NonNormalizedPosterior, "negative or NaN weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw Error(ErrorCode::NonNormalizedPosterior, "weights sum to " + io::format_double(total));
}

double PosteriorGrid::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m += weights_[i] * points_[i];
  return m;
}

double PosteriorGrid::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < size(); ++i) v += weights_[i] * (points_[i] - m) * (points_[i] - m);
  return v;
}

std::size_t PosteriorGrid::mode_index() const {
  return static_cast<std::size_t>(std::max_element(weights_.begin(), weights_.end()) - weights_.begin());
}

PosteriorGrid posterior_grid(const BayesModel& model, const Dataset& data, const std::vector<double>& grid) {
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "grid has no points");
  std::vector<double> logw(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    logw[i] = log_posterior_unnorm(model, Point{grid[i]}, data);
    if (std::isnan(logw[i])) throw Error(ErrorCode::NaNDensity, "log-posterior is NaN on the grid");
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  if (top == kNegInf) throw Error(ErrorCode::AllDegenerate, "log-posterior is -inf on the whole grid");
  std::vector<double> w(grid.size());
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) total += (w[i] = std::exp(logw[i] - top));
  for (auto& v : w) v /= total;
  return PosteriorGrid(grid, std::move(w));
}

PosteriorMean posterior_mean(const Trace& trace, const std::function<double(PointView)>& g,
                             const std::optional<PosteriorGrid>& exact) {
  if (trace.samples.empty()) throw Error(ErrorCode::EmptyTrace, "trace has no samples");
  PosteriorMean result;
  double sum = 0.0;
  for (const auto& s : trace.samples) sum += g(s);
  result.estimate = sum / static_cast<double>(trace.samples.size());
  if (exact) {
    double e = 0.0;
    for (std::size_t i = 0; i < exact->size(); ++i) e += exact->weights()[i] * g(Point{exact->points()[i]});
    result.exact = e;
  }
  return result;
}

Loss Loss::zero_one(double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "zero_one loss needs epsilon > 0");
  return Loss(Kind::ZeroOne, epsilon);
}

Loss Loss::parse(std::string_view name, double epsilon) {
  if (name == "squared") return squared();
  if (name == "zero_one") return zero_one(epsilon);
  throw Error(ErrorCode::UnknownLoss, std::string(name));
}

double risk(const Loss& loss, double decision, const PosteriorGrid& posterior) {
  const auto& pts = posterior.points();
  const auto& w = posterior.weights();
  double r = 0.0;
  switch (loss.kind()) {
    case Loss::Kind::Squared:
      for (std::size_t i = 0; i < pts.size(); ++i) r += w[i] * (decision - pts[i]) * (decision - pts[i]);
      return r;
    case Loss::Kind::ZeroOne:
      r = 1.0;
      for (std::size_t i = 0; i < pts.size(); ++i)
        if (std::abs(pts[i] - decision) < loss.epsilon()) r -= w[i];
      return r;
  }
  throw Error(ErrorCode::UnknownLoss, "unhandled loss kind");
}

}  // namespace mcmc
