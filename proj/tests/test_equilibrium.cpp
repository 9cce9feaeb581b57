#include <gtest/gtest.h>

#include "support.hpp"

using namespace crashnet;

namespace {

FinancialNetwork scalar_net(double dp) {
  FinancialNetwork net;
  net.ownership = Matrix::Ones(1, 1);
  net.cross_holdings = Matrix::Zero(1, 1);
  net.self_ownership = Vector::Ones(1);
  net.prices = Vector::Constant(1, dp);
  return net;
}

FailureSpec scalar_fail(double vc, double beta) {
  return {Vector::Constant(1, vc), Vector::Constant(1, beta)};
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST(LinearEquilibrium, NoCrossHoldingsGivesDp) {
  auto net = generate_random_network(4, 6, 10, 40, 3);
  net.cross_holdings.setZero();
  net.self_ownership.setOnes();
  const auto s = linear_equilibrium(net);
  EXPECT_LT((s.market_values - net.ownership * net.prices).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LinearEquilibrium, HandInvertedTwoByTwo) {
  FinancialNetwork net;
  net.ownership = Matrix(2, 1);
  net.ownership << 0.5, 0.5;
  net.cross_holdings = Matrix(2, 2);
  net.cross_holdings << 0.0, 0.3, 0.2, 0.0;
  net.self_ownership = vec({0.8, 0.7});
  net.prices = vec({10.0});
  // (I - C)^{-1} = [[1, 0.3], [0.2, 1]] / (1 - 0.3 * 0.2)
  const double det = 1.0 - 0.3 * 0.2;
  const double V0 = (5.0 + 0.3 * 5.0) / det;
  const double V1 = (0.2 * 5.0 + 5.0) / det;
  const auto s = linear_equilibrium(net);
  EXPECT_NEAR(s.equity_values[0], V0, 1e-12);
  EXPECT_NEAR(s.equity_values[1], V1, 1e-12);
  EXPECT_NEAR(s.market_values[0], 0.8 * V0, 1e-12);
  EXPECT_NEAR(s.market_values[1], 0.7 * V1, 1e-12);
}

TEST(LinearEquilibrium, SingularIsNumericError) {
  FinancialNetwork net;
  net.ownership = Matrix::Constant(2, 1, 0.5);
  net.cross_holdings = Matrix(2, 2);
  net.cross_holdings << 0.0, 1.0, 1.0, 0.0;
  net.self_ownership = Vector::Constant(2, 0.6);
  net.prices = Vector::Constant(1, 1.0);
  try {
    linear_equilibrium(net);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("condition"), std::string::npos);
  }
}

TEST(FailureVector, Boundaries) {
  const FailureSpec f{vec({5, 6}), vec({2, 3})};
  EXPECT_EQ(failure_vector(f, vec({6, 7})), vec({0, 0}));
  EXPECT_EQ(failure_vector(f, vec({4, 5})), vec({2, 3}));
  // sitting exactly at the threshold is not a failure
  EXPECT_EQ(failure_vector(f, vec({5, 6})), vec({0, 0}));
}

TEST(Objective, ScalarTwoEquilibria) {
  const auto net = scalar_net(10);
  const auto f = scalar_fail(8, 5);
  EXPECT_NEAR(objective(net, f, vec({10})), 0.0, 1e-12);
  EXPECT_NEAR(objective(net, f, vec({5})), 0.0, 1e-12);
  EXPECT_NEAR(objective(net, f, vec({7})), 4.0, 1e-12);
}

TEST(Objective, ZeroAtLinearEquilibriumWithoutFailure) {
  const auto net = generate_random_network(5, 8, 10, 40, 9);
  const auto s = linear_equilibrium(net);
  const FailureSpec none{0.8 * s.market_values, Vector::Zero(5)};
  EXPECT_LE(objective(net, none, s.market_values), 1e-12);
}

TEST(ExhaustiveEquilibrium, ScalarScanFindsBothEquilibria) {
  const auto ex = exhaustive_equilibrium(scalar_net(10), scalar_fail(8, 5), 5);
  ASSERT_EQ(ex.minimizers.size(), 2u);
  EXPECT_EQ(ex.minimizers[0].market_values[0], 5.0);
  EXPECT_EQ(ex.minimizers[1].market_values[0], 10.0);
  EXPECT_NEAR(ex.best_objective, 0.0, 1e-12);
  EXPECT_EQ(ex.evaluations, 32u);
}

TEST(ExhaustiveEquilibrium, NoFailureGivesRoundedLinear) {
  // integer-valued equilibrium: C = 0, C~ = I, integer D p
  FinancialNetwork net;
  net.ownership = Matrix::Identity(2, 2);
  net.cross_holdings = Matrix::Zero(2, 2);
  net.self_ownership = Vector::Ones(2);
  net.prices = vec({7, 19});
  const FailureSpec none{vec({1, 1}), vec({0, 0})};
  const auto ex = exhaustive_equilibrium(net, none, 5);
  ASSERT_EQ(ex.minimizers.size(), 1u);
  EXPECT_EQ(ex.minimizers[0].market_values, vec({7, 19}));
}

TEST(ExhaustiveEquilibrium, MatchesIndependentRescan) {
  const auto net = perturb_prices(testing_support::paper_shaped_network(4), {1, 5});
  const auto fail = default_failure_spec(testing_support::paper_shaped_network(4));
  GridSearchOptions opt;
  opt.use_smoothed = true;
  const auto ex = exhaustive_equilibrium(net, fail, 5, opt);
  double best = 1e300;
  for (int a = 0; a < 32; ++a)
    for (int b = 0; b < 32; ++b)
      for (int c = 0; c < 32; ++c)
        best = std::min(best, smoothed_objective(net, fail, vec({double(a), double(b), double(c)}), 3, 31.0));
  EXPECT_NEAR(ex.best_objective, best, 1e-9 * (1 + best));
  EXPECT_EQ(ex.evaluations, 32768u);
  for (const auto& m : ex.minimizers)
    EXPECT_NEAR(smoothed_objective(net, fail, m.market_values, 3, 31.0), best, 1e-9 * (1 + best));
}

TEST(ExhaustiveEquilibrium, CapIsResourceError) {
  const auto net = generate_random_network(6, 6, 10, 40, 1);
  const auto f = default_failure_spec(net);
  EXPECT_THROW(exhaustive_equilibrium(net, f, 5), ResourceError);
}

TEST(Cascade, NoFailureConvergesInOneStep) {
  const auto net = generate_random_network(3, 4, 10, 40, 2);
  const auto s = linear_equilibrium(net);
  const FailureSpec none{Vector::Zero(3), Vector::Zero(3)};
  const auto r = cascade_iteration(net, none, Vector::Zero(3), 10);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.steps, 1u);
  EXPECT_LT((r.market_values - s.market_values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Cascade, ScalarBranches) {
  const auto net = scalar_net(10);
  const auto f = scalar_fail(8, 5);
  auto hi = cascade_iteration(net, f, vec({10}), 10);
  EXPECT_TRUE(hi.converged);
  EXPECT_EQ(hi.market_values[0], 10.0);
  auto lo = cascade_iteration(net, f, vec({0}), 10);
  EXPECT_TRUE(lo.converged);
  EXPECT_EQ(lo.market_values[0], 5.0);
  EXPECT_THROW(cascade_iteration(net, f, vec({0}), 0), ParameterError);
}

TEST(CrashReportTest, Cases) {
  const Vector before = vec({21.18, 23.33, 30.83});
  const FailureSpec f{0.8 * before, vec({1, 1, 1})};
  auto same = crash_report(before, before, f);
  EXPECT_TRUE(same.failed.empty());
  EXPECT_EQ(same.drops, Vector::Zero(3));

  Vector after = before;
  after[1] = 0.8 * 23.33 - 0.01;
  auto one = crash_report(before, after, f);
  EXPECT_EQ(one.failed, std::set<std::size_t>{1});
  EXPECT_NEAR(one.drops[1], after[1] - before[1], 1e-12);

  auto all = crash_report(before, Vector::Zero(3), f);
  EXPECT_EQ(all.failed, (std::set<std::size_t>{0, 1, 2}));
  EXPECT_NEAR(all.relative_drops[0], -1.0, 1e-12);

  // failure although the price-only value stays above threshold
  auto casc = crash_report(before, after, f, before);
  EXPECT_TRUE(casc.cascade);
  auto plain = crash_report(before, after, f, after);
  EXPECT_FALSE(plain.cascade);
}

TEST(DefaultFailureSpec, Fractions) {
  const auto net = generate_random_network(3, 7, 10, 40, 8);
  const auto s = linear_equilibrium(net);
  const auto f = default_failure_spec(net);
  EXPECT_EQ(f.critical_values, 0.8 * s.market_values);
  EXPECT_EQ(f.failure_magnitudes, 0.3 * s.equity_values);
  EXPECT_THROW(default_failure_spec(net, 1.5, 0.3), ParameterError);
}
