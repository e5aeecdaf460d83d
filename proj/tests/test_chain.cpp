#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "fixtures.hpp"
#include "mcmc/chain.hpp"
#include "mcmc/chain_io.hpp"

namespace mcmc {
namespace {

using Rows = std::vector<std::vector<double>>;

FiniteChain two_state(double a, double b) { return validate_chain(Rows{{1 - a, a}, {b, 1 - b}}); }

FiniteChain three_cycle() { return validate_chain(Rows{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}); }

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

TEST(Validate, AcceptsIdentityAndStochasticRows) {
  auto id = validate_chain(Rows{{1, 0}, {0, 1}});
  EXPECT_EQ(id.size(), 2u);
  EXPECT_EQ(id.states(), (std::vector<std::string>{"0", "1"}));
  auto p = validate_chain(Rows{{0.5, 0.5}, {0.3, 0.7}});
  EXPECT_DOUBLE_EQ(p(1, 1), 0.7);
}

TEST(Validate, RejectsBadRowSumWithRowAndSum) {
  try {
    validate_chain(Rows{{0.5, 0.4}, {0.3, 0.7}});
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RowSumViolation);
    const std::string what = e.what();
    EXPECT_NE(what.find("row 0"), std::string::npos) << what;
    EXPECT_NE(what.find("0.9"), std::string::npos) << what;
  }
}

TEST(Validate, RejectsMalformedInput) {
  EXPECT_MCMC_ERROR(validate_chain(Rows{{0.5, 0.5}}), ErrorCode::NonSquare);
  EXPECT_MCMC_ERROR(validate_chain(Rows{{1.5, -0.5}, {0, 1}}), ErrorCode::NegativeEntry);
  EXPECT_MCMC_ERROR(validate_chain(Rows{{1, 0}, {0, 1}}, {"a", "a"}), ErrorCode::DuplicateLabel);
  EXPECT_MCMC_ERROR(validate_chain(Rows{{1, 0}, {0, 1}}, {"a"}), ErrorCode::DimensionMismatch);
}

TEST(Validate, RenormalizesRowsWithinTolerance) {
  auto p = validate_chain(Rows{{0.5 + 4e-10, 0.5}, {0.25, 0.75}});
  EXPECT_NEAR(p.matrix().row(0).sum(), 1.0, 1e-15);
  EXPECT_MCMC_ERROR(validate_chain(Rows{{0.5 + 2e-9, 0.5}, {0.25, 0.75}}), ErrorCode::RowSumViolation);
}

TEST(Validate, IsIdempotent) {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    auto p = testing::random_positive_chain(rng, 6);
    EXPECT_EQ(validate_chain(p.matrix(), p.states()), p);
  }
}

TEST(Validate, UnknownLabel) {
  auto p = two_state(0.2, 0.4);
  EXPECT_MCMC_ERROR(p.index_of("nope"), ErrorCode::UnknownState);
}

TEST(Irreducible, Examples) {
  EXPECT_FALSE(is_irreducible(validate_chain(Rows{{1, 0}, {0, 1}})));
  EXPECT_TRUE(is_irreducible(validate_chain(Rows{{0, 1}, {1, 0}})));
  EXPECT_FALSE(is_irreducible(validate_chain(Rows{{0.5, 0.5, 0}, {0.5, 0.5, 0}, {0, 0.5, 0.5}})));
}

TEST(Irreducible, InvariantUnderSimultaneousPermutation) {
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rng.index(7);
    Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t x = 0; x < n; ++x) {
      raw(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(rng.index(n))) += 1.0;
      raw(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(rng.index(n))) += 1.0;
      raw.row(static_cast<Eigen::Index>(x)) /= raw.row(static_cast<Eigen::Index>(x)).sum();
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd permuted(raw.rows(), raw.cols());
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        permuted(static_cast<Eigen::Index>(perm[x]), static_cast<Eigen::Index>(perm[y])) =
            raw(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
    EXPECT_EQ(is_irreducible(validate_chain(raw)), is_irreducible(validate_chain(permuted)));
  }
}

TEST(Period, Examples) {
  EXPECT_EQ(period(validate_chain(Rows{{0, 1}, {1, 0}}), std::size_t{0}), 2u);
  auto cycle = three_cycle();
  for (std::size_t s = 0; s < 3; ++s) EXPECT_EQ(period(cycle, s), 3u);
  EXPECT_EQ(period(cycle, std::string_view("2")), 3u);
  EXPECT_TRUE(is_aperiodic(validate_chain(Rows{{0.1, 0.9, 0}, {0, 0.5, 0.5}, {0.3, 0.3, 0.4}})));
  EXPECT_FALSE(is_aperiodic(cycle));
}

TEST(Period, MixedCycleLengthsGiveGcd) {
  // 0-1-2-3-0 has length 4 and 0-4-5-6-7-3-0 has length 6.
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(8, 8);
  p(0, 1) = 0.5;
  p(0, 4) = 0.5;
  p(1, 2) = p(2, 3) = p(3, 0) = 1.0;
  p(4, 5) = p(5, 6) = p(6, 7) = 1.0;
  p(7, 3) = 1.0;
  auto chain = validate_chain(p);
  for (std::size_t s = 0; s < 8; ++s) EXPECT_EQ(period(chain, s), 2u);
  p(7, 3) = 0.5;
  p(7, 0) = 0.5;  // adds 0-4-5-6-7-0 of length 5
  EXPECT_TRUE(is_aperiodic(validate_chain(p)));
}

TEST(Period, NoReturnPath) {
  auto p = validate_chain(Rows{{0, 1}, {0, 1}});
  EXPECT_MCMC_ERROR(period(p, std::size_t{0}), ErrorCode::NoReturnPath);
  EXPECT_EQ(period(p, std::size_t{1}), 1u);
  EXPECT_MCMC_ERROR(is_aperiodic(p), ErrorCode::NoReturnPath);
}

TEST(Period, AllStatesAgreeWithSingleStateQueries) {
  Rng rng(12);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + rng.index(10);
    Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index x = 0; x < raw.rows(); ++x) {
      raw(x, static_cast<Eigen::Index>(rng.index(n))) += 1.0;
      if (rng.uniform() < 0.5) raw(x, static_cast<Eigen::Index>(rng.index(n))) += 1.0;
      raw.row(x) /= raw.row(x).sum();
    }
    auto chain = validate_chain(raw);
    const auto all = state_periods(chain);
    for (std::size_t x = 0; x < n; ++x) {
      if (all[x] == 0)
        EXPECT_MCMC_ERROR(period(chain, x), ErrorCode::NoReturnPath);
      else
        EXPECT_EQ(period(chain, x), all[x]);
    }
  }
}

TEST(Period, InvariantUnderRelabeling) {
  auto cycle = three_cycle();
  auto relabeled = validate_chain(cycle.matrix(), {"c", "a", "b"});
  for (std::size_t s = 0; s < 3; ++s) EXPECT_EQ(period(cycle, s), period(relabeled, s));
  EXPECT_EQ(period(relabeled, std::string_view("a")), 3u);
}

TEST(Stationary, Examples) {
  auto half = stationary_distribution(two_state(0.3, 0.3));
  EXPECT_NEAR(half[0], 0.5, 1e-12);
  EXPECT_NEAR(half[1], 0.5, 1e-12);
  auto pi = stationary_distribution(two_state(0.2, 0.4));
  EXPECT_NEAR(pi[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(pi[1], 1.0 / 3.0, 1e-12);
  auto sym = stationary_distribution(validate_chain(Rows{{0.9, 0.1}, {0.1, 0.9}}));
  EXPECT_NEAR(sym[0], 0.5, 1e-12);
}

TEST(Stationary, ClosedFormTwoState) {
  Rng rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const double a = 0.01 + 0.98 * rng.uniform();
    const double b = 0.01 + 0.98 * rng.uniform();
    auto pi = stationary_distribution(two_state(a, b));
    EXPECT_NEAR(pi[0], b / (a + b), 1e-12);
  }
}

TEST(Stationary, RejectsReducibleChain) {
  EXPECT_MCMC_ERROR(stationary_distribution(validate_chain(Rows{{1, 0}, {0, 1}})),
                    ErrorCode::NotIrreducible);
}

TEST(Stationary, PowerIterationAgreesWithDirectSolve) {
  Rng rng(5);
  StationaryOptions power;
  power.method = StationaryMethod::PowerIteration;
  StationaryOptions direct;
  direct.method = StationaryMethod::DirectSolve;
  for (int rep = 0; rep < 20; ++rep) {
    auto p = testing::random_sparse_ergodic_chain(rng, 3 + rng.index(20));
    auto a = stationary_distribution(p, power);
    auto b = stationary_distribution(p, direct);
    EXPECT_LE(max_abs_diff(a.probs(), b.probs()), 1e-9);
    EXPECT_LE(fixed_point_residual(p, a), kFixedPointTolerance);
  }
}

TEST(Stationary, PowerIterationHandlesPeriodicChain) {
  StationaryOptions power;
  power.method = StationaryMethod::PowerIteration;
  auto pi = stationary_distribution(three_cycle(), power);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(pi[i], 1.0 / 3.0, 1e-10);
}

TEST(Stationary, PowerIterationCapReported) {
  StationaryOptions power;
  power.method = StationaryMethod::PowerIteration;
  power.power_max_iterations = 3;
  EXPECT_MCMC_ERROR(stationary_distribution(validate_chain(Rows{{0.999, 0.001}, {0.002, 0.998}}), power),
                    ErrorCode::PowerIterationDiverged);
}

TEST(Stationary, AutoFallsBackToPowerIterationAboveLimit) {
  Rng rng(8);
  auto p = testing::random_sparse_ergodic_chain(rng, 30);
  StationaryOptions small_limit;
  small_limit.direct_limit = 10;
  auto pi = stationary_distribution(p, small_limit);
  EXPECT_LE(fixed_point_residual(p, pi), kFixedPointTolerance);
}

// Detailed balance with a known positive pi forces pi to be stationary.
TEST(Stationary, RecoversPiOfReversibleChains) {
  Rng rng(20240611);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng.index(7);
    const auto pi = testing::random_distribution(rng, n);
    auto chain = testing::reversible_chain(rng, pi);
    auto got = stationary_distribution(chain);
    EXPECT_LE(max_abs_diff(got.probs(), pi), 1e-8);
    EXPECT_LE(fixed_point_residual(chain, got), kFixedPointTolerance);
    EXPECT_TRUE(is_reversible(chain, got));
  }
}

TEST(DetailedBalance, Examples) {
  auto id = validate_chain(Rows{{1, 0}, {0, 1}});
  EXPECT_EQ(detailed_balance_residual(id, ProbVector(id.states(), {0.3, 0.7})), 0.0);
  auto flat = validate_chain(Rows{{0.5, 0.5}, {0.5, 0.5}});
  EXPECT_EQ(detailed_balance_residual(flat, ProbVector::uniform(flat.states())), 0.0);
  auto cycle = three_cycle();
  auto u = ProbVector::uniform(cycle.states());
  EXPECT_NEAR(detailed_balance_residual(cycle, u), 1.0 / 3.0, 1e-15);
  EXPECT_FALSE(is_reversible(cycle, u));
}

TEST(DetailedBalance, DimensionMismatch) {
  auto p = two_state(0.2, 0.4);
  EXPECT_MCMC_ERROR(detailed_balance_residual(p, ProbVector::uniform({"a", "b", "c"})),
                    ErrorCode::DimensionMismatch);
}

TEST(ProbVectorTest, Validation) {
  EXPECT_MCMC_ERROR(ProbVector({"a", "b"}, {0.5, 0.6}), ErrorCode::RowSumViolation);
  EXPECT_MCMC_ERROR(ProbVector({"a", "b"}, {1.5, -0.5}), ErrorCode::NegativeEntry);
  EXPECT_MCMC_ERROR(ProbVector({"a"}, {0.5, 0.5}), ErrorCode::DimensionMismatch);
  auto pm = ProbVector::point_mass({"a", "b", "c"}, 2);
  EXPECT_EQ(pm.probs(), (std::vector<double>{0, 0, 1}));
}

TEST(StepDistribution, Examples) {
  auto swap = validate_chain(Rows{{0, 1}, {1, 0}});
  auto start = ProbVector::point_mass(swap.states(), 0);
  EXPECT_EQ(step_distribution(swap, start, 0).probs(), start.probs());
  EXPECT_EQ(step_distribution(swap, start, 2).probs(), (std::vector<double>{1, 0}));
  auto p = validate_chain(Rows{{0.5, 0.5}, {0.25, 0.75}});
  auto one = step_distribution(p, ProbVector::point_mass(p.states(), 0), 1);
  EXPECT_DOUBLE_EQ(one[0], 0.5);
  EXPECT_DOUBLE_EQ(one[1], 0.5);
}

TEST(StepDistribution, MethodsAgreeAndStayValid) {
  Rng rng(13);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rng.index(9);
    auto chain = rep % 2 ? testing::random_positive_chain(rng, n) : testing::random_sparse_ergodic_chain(rng, n);
    ProbVector start(chain.states(), testing::random_distribution(rng, n));
    const std::size_t t = rng.index(200);
    auto a = step_distribution(chain, start, t, StepMethod::Iterated);
    auto b = step_distribution(chain, start, t, StepMethod::Squaring);
    EXPECT_LE(max_abs_diff(a.probs(), b.probs()), 1e-12);
    EXPECT_NEAR(std::accumulate(a.probs().begin(), a.probs().end(), 0.0), 1.0, 1e-9);
    for (double v : a.probs()) EXPECT_GE(v, 0.0);
  }
}

TEST(StepDistribution, DimensionMismatch) {
  EXPECT_MCMC_ERROR(step_distribution(two_state(0.2, 0.4), ProbVector::uniform({"a", "b", "c"}), 1),
                    ErrorCode::DimensionMismatch);
}

TEST(MatrixPower, MatchesRepeatedProduct) {
  auto p = two_state(0.2, 0.4);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Identity(2, 2);
  for (int i = 0; i < 7; ++i) expected *= p.matrix();
  EXPECT_LE((matrix_power(p, 7) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ChainJson, RoundTripIsExact) {
  Rng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    auto chain = testing::random_positive_chain(rng, 1 + rng.index(8));
    EXPECT_EQ(parse_chain_json(to_chain_json(chain)), chain);
  }
}

TEST(ChainJson, ParsesLabelsAndFiles) {
  auto chain = read_chain_file(std::string(MCMCKIT_DATA_DIR) + "/two_state.json");
  EXPECT_EQ(chain.states(), (std::vector<std::string>{"a", "b"}));
  auto numeric = parse_chain_json(R"({"states": [1, 2], "matrix": [[0.5, 0.5], [1, 0]]})");
  EXPECT_EQ(numeric.state(1), "2");
}

TEST(ChainJson, ErrorsCarryPosition) {
  try {
    parse_chain_json("{\"states\": [\"a\"],\n \"matrix\": [[1,]]}");
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_MCMC_ERROR(parse_chain_json(R"({"states": ["a"]})"), ErrorCode::Parse);
  EXPECT_MCMC_ERROR(parse_chain_json(R"({"states": ["a", "b"], "matrix": [[0.5, 0.4], [0, 1]]})"),
                    ErrorCode::RowSumViolation);
  EXPECT_MCMC_ERROR(read_chain_file("/nonexistent/chain.json"), ErrorCode::Io);
}

}  // namespace
}  // namespace mcmc
