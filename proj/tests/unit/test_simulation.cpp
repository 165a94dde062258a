#include <gtest/gtest.h>

#include "error_matchers.hpp"
#include "oracles.hpp"
#include "viewfuse/simulation.hpp"

using namespace viewfuse;
using vf_test::code_of;

namespace {

std::vector<PolicyConfig> all_strategies() {
  std::vector<PolicyConfig> out(3);
  out[0].strategy = Strategy::Ucb1;
  out[1].strategy = Strategy::Thompson;
  out[2].strategy = Strategy::EpsilonGreedy;
  return out;
}

}  // namespace

TEST(BanditEnvironment, ParsesArmsAndRejectsJunk) {
  const auto env = BanditEnvironment::from_json(nlohmann::json::parse(R"({
    "arms": [0.9, {"type": "bernoulli", "p": 0.4}, {"type": "gaussian", "mean": 0.5, "stddev": 0.1}],
    "rounds": 2000, "final_window": 500, "checkpoint_every": 250})"));
  ASSERT_EQ(env.arms.size(), 3u);
  EXPECT_EQ(env.arms[2].kind, ArmDistribution::Kind::Gaussian);
  EXPECT_EQ(env.best_arm(), 0u);
  EXPECT_EQ(env.final_window, 500u);
  EXPECT_EQ(code_of([] { (void)BanditEnvironment::from_json(nlohmann::json::parse(R"({"arms": [], "rounds": 5})")); }),
            ErrorCode::NoArms);
  EXPECT_EQ(code_of([] { (void)BanditEnvironment::from_json(nlohmann::json::parse(R"({"arms": [1.5]})")); }),
            ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { (void)BanditEnvironment::from_json(nlohmann::json::parse(R"({"arms": [0.5], "x": 1})")); }),
            ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] {
              (void)BanditEnvironment::from_json(nlohmann::json::parse(R"({"arms": [{"type": "cauchy"}]})"));
            }),
            ErrorCode::ConfigError);
}

TEST(Simulation, SingleArmIsTrivial) {
  const auto env = BanditEnvironment::bernoulli({0.6}, 500);
  const std::vector<std::uint64_t> seeds = {1, 2, 3};
  const auto report = simulate_strategies(env, all_strategies(), seeds);
  ASSERT_EQ(report.strategies.size(), 3u);
  for (const auto& s : report.strategies) {
    EXPECT_EQ(s.regret_curve.back(), 0.0);
    EXPECT_EQ(s.best_arm_frequency, 1.0);
    EXPECT_EQ(s.mean_reward, report.strategies[0].mean_reward);
  }
}

TEST(Simulation, SameSeedsGiveIdenticalCsv) {
  const auto env = BanditEnvironment::bernoulli({0.9, 0.6, 0.5, 0.4, 0.3}, 2000);
  const std::vector<std::uint64_t> seeds = {4, 5};
  const auto a = simulate_strategies(env, all_strategies(), seeds);
  const auto b = simulate_strategies(env, all_strategies(), seeds);
  EXPECT_EQ(a.summary_csv(), b.summary_csv());
  EXPECT_EQ(a.regret_csv(), b.regret_csv());
  const std::vector<std::uint64_t> other = {6, 7};
  EXPECT_NE(a.summary_csv(), simulate_strategies(env, all_strategies(), other).summary_csv());
  EXPECT_EQ(a.summary_csv().substr(0, a.summary_csv().find('\n')),
            "strategy,mean_reward,best_arm_frequency,final_regret");
}

TEST(Simulation, RunBookkeepingMatchesReplay) {
  const auto env = BanditEnvironment::bernoulli({0.7, 0.2, 0.5}, 3000);
  for (const auto& policy : all_strategies()) {
    const auto run = simulate_run(env, policy, 11);
    ASSERT_EQ(run.selections.size(), 3000u);
    double regret = 0.0;
    for (std::size_t t = 0; t < run.selections.size(); ++t) {
      regret += env.best_mean() - env.arms[run.selections[t]].mean;
      EXPECT_NEAR(run.cumulative_regret[t], regret, 1e-9);
    }
  }
}

TEST(Simulation, Ucb1ConvergesOnTheStandardInstance) {
  const auto env = BanditEnvironment::bernoulli({0.9, 0.6, 0.5, 0.4, 0.3}, 10000);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
  std::vector<PolicyConfig> ucb(1);
  const auto report = simulate_strategies(env, ucb, seeds);
  const auto& r = report.strategies[0];
  EXPECT_GT(r.best_arm_frequency, 0.9);
  ASSERT_EQ(r.checkpoints.front(), 1000u);
  ASSERT_EQ(r.checkpoints.back(), 10000u);
  EXPECT_LT(r.regret_curve.back() / 10000.0, r.regret_curve.front() / 1000.0);
}

TEST(Simulation, UnknownStrategyName) {
  EXPECT_EQ(code_of([] { (void)parse_strategy("exp3"); }), ErrorCode::UnknownStrategy);
}
