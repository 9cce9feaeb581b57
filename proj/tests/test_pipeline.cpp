#include <gtest/gtest.h>

#include "support.hpp"

using namespace crashnet;

namespace {

PipelineConfig paper_shaped(std::uint64_t seed) {
  PipelineConfig c;
  c.network_seed = seed;
  c.prices = std::vector<double>{8.43, 14.47, 6.75, 8.09, 19.11, 11.32, 7.19};
  c.random_zeroed = 2;
  c.perturb_seed = seed;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Pipeline, PaperShapedReportsOracleGap) {
  std::map<std::string, std::string> artifacts;
  const auto res = run_pipeline(paper_shaped(1), true,
                                [&](const std::string& k, const std::string& v) { artifacts[k] = v; });
  const auto& rep = res.report;
  for (const char* section : {"run", "config", "network", "failure_spec", "hubo_stats",
                              "reduction_stats", "solver_stats", "decoded_equilibrium", "oracle",
                              "crash_report"})
    EXPECT_TRUE(rep.contains(section)) << section;
  ASSERT_FALSE(rep["oracle"].is_null());
  EXPECT_TRUE(rep["oracle"].contains("objective_gap"));
  EXPECT_EQ(rep["reduction_stats"]["logical"], 15);
  EXPECT_EQ(rep["perturbation"]["zeroed_assets"].size(), 2u);
  EXPECT_GE(rep["oracle"]["objective_gap"].get<double>(), -1e-9);
  EXPECT_EQ(artifacts.size(), 3u);
  EXPECT_EQ(artifacts.at("values.csv"), res.csv);
  EXPECT_EQ(std::count(res.csv.begin(), res.csv.end(), '\n'), 4);
}

TEST(Pipeline, ZeroBetaGivesRoundedLinearEquilibrium) {
  auto cfg = paper_shaped(2);
  cfg.beta_fraction = 0.0;
  const auto res = run_pipeline(cfg, true);
  const MarketState lin = linear_equilibrium(res.perturbed);
  for (Eigen::Index i = 0; i < lin.market_values.size(); ++i)
    EXPECT_EQ(res.decoded[i], std::clamp(std::round(lin.market_values[i]), 0.0, 31.0)) << i;
  EXPECT_TRUE(res.report["oracle"]["attains_optimum"].get<bool>());
}

TEST(Pipeline, NoPerturbationKeepsLinearState) {
  auto cfg = paper_shaped(3);
  cfg.random_zeroed = 0;
  const auto res = run_pipeline(cfg, true);
  EXPECT_EQ(res.perturbed.prices, res.network.prices);
  EXPECT_EQ(res.report["linear_equilibrium_after"], res.report["linear_equilibrium_before"]);
  EXPECT_TRUE(res.report["perturbation"]["zeroed_assets"].empty());
}

TEST(Pipeline, NoPerturbationWithoutFailureSizeHasNoFailures) {
  auto cfg = paper_shaped(3);
  cfg.random_zeroed = 0;
  cfg.beta_fraction = 0.0;
  const auto res = run_pipeline(cfg, true);
  EXPECT_TRUE(res.crash.failed.empty());
  EXPECT_TRUE(res.report["crash_report"]["failed"].empty());
}

TEST(Pipeline, UnperturbedGridCanFavourCrashedEquilibrium) {
  // The healthy state is an exact equilibrium off the grid; rounding it costs
  // more than the self-consistent crashed grid point below.
  auto net = generate_random_network(3, 7, 10, 40, 1);
  net.prices << 8.43, 14.47, 6.75, 8.09, 19.11, 11.32, 7.19;
  const auto fail = default_failure_spec(net, 0.8, 0.3);
  const Vector healthy = linear_equilibrium(net).market_values.array().round();
  const Vector crashed = Vector{{21.0, 19.0, 11.0}};
  EXPECT_TRUE((failure_vector(fail, healthy).array() == 0.0).all());
  EXPECT_TRUE((crashed.array() < fail.critical_values.array()).any());
  EXPECT_LT(objective(net, fail, crashed), objective(net, fail, healthy));
}

TEST(Pipeline, NormalizedReportsAreByteIdentical) {
  const auto cfg = paper_shaped(4);
  const auto a = run_pipeline(cfg, true);
  const auto b = run_pipeline(cfg, true);
  EXPECT_EQ(a.report.dump(2), b.report.dump(2));
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_FALSE(a.report["run"].contains("timestamp"));
  EXPECT_TRUE(run_pipeline(cfg, false).report["run"].contains("timestamp"));
}

TEST(Pipeline, OracleGapNeverNegative) {
  for (std::uint64_t seed = 10; seed < 14; ++seed) {
    auto cfg = paper_shaped(seed);
    cfg.reads = 3;
    cfg.solver = seed % 2 ? PipelineSolver::tabu : PipelineSolver::anneal;
    const auto res = run_pipeline(cfg, true);
    ASSERT_TRUE(res.oracle_objective);
    EXPECT_GE(res.solver_objective, *res.oracle_objective - 1e-9 * (1 + *res.oracle_objective));
  }
}

TEST(Pipeline, ConfigValidationListsEveryProblem) {
  PipelineConfig c;
  c.vc_fraction = 2;
  c.beta_fraction = -1;
  c.degree = 4;
  c.reads = 0;
  EXPECT_EQ(c.validate().size(), 4u);
  try {
    run_pipeline(c);
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("r must be"), std::string::npos);
  }
  EXPECT_NE(c.hash(), PipelineConfig{}.hash());
}

TEST(Pipeline, StageNameOnFailure) {
  PipelineConfig c;
  c.network_file = "/nonexistent/network.json";
  try {
    run_pipeline(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("stage network:", 0), 0u) << e.what();
  }
}
