#include <gtest/gtest.h>

#include <fstream>

#include "corpus.hpp"
#include "error_matchers.hpp"
#include "viewfuse/config.hpp"

using namespace viewfuse;
using vf_test::code_of;

TEST(PipelineConfig, Defaults) {
  const PipelineConfig c = PipelineConfig::from_json(nlohmann::json::object());
  EXPECT_EQ(c.blend_ratio, 0.2);
  EXPECT_EQ(c.gate_threshold, 0.557);
  EXPECT_EQ(c.dbscan.eps, 0.15);
  EXPECT_EQ(c.dbscan.min_pts, 2u);
  EXPECT_EQ(c.policy.strategy, Strategy::Ucb1);
  EXPECT_EQ(c.policy.exploration_weight, 0.5);
  EXPECT_EQ(c.bandit_rounds, 50u);
  EXPECT_EQ(c.generation.num_candidates, 5u);
  EXPECT_EQ(c.generation.temperature, 0.7);
  EXPECT_EQ(c.w_fb, 1.2);
  EXPECT_EQ(c.workers, 1u);
  EXPECT_FALSE(c.cache_dir.has_value());
}

TEST(PipelineConfig, ReadsNestedSections) {
  const auto j = nlohmann::json::parse(R"({
    "blend_ratio": 0.3, "seed": 7, "workers": 4, "cache_dir": "c", "mock": true,
    "dbscan": {"eps": 0.2, "min_pts": 3},
    "bandit": {"strategy": "thompson", "rounds": 80, "update_rule": "ema", "learning_rate": 0.2},
    "generation": {"temperature": 1.0, "num_candidates": 7},
    "prompts": {"identification": "What is in the {view} view?"}
  })");
  const PipelineConfig c = PipelineConfig::from_json(j);
  EXPECT_EQ(c.blend_ratio, 0.3);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.workers, 4u);
  EXPECT_EQ(c.cache_dir, std::filesystem::path("c"));
  EXPECT_TRUE(c.mock);
  EXPECT_EQ(c.dbscan.min_pts, 3u);
  EXPECT_EQ(c.policy.strategy, Strategy::Thompson);
  EXPECT_EQ(c.policy.rule, UpdateRule::ExponentialMovingAverage);
  EXPECT_EQ(c.bandit_rounds, 80u);
  EXPECT_EQ(c.generation.num_candidates, 7u);
  EXPECT_EQ(c.prompts.identification, "What is in the {view} view?");
  EXPECT_EQ(PipelineConfig::from_json(c.to_json()).to_json(), c.to_json());
}

TEST(PipelineConfig, RejectsUnknownKeysAtEveryLevel) {
  for (const char* text : {R"({"blend": 0.2})", R"({"dbscan": {"epsilon": 0.1}})", R"({"bandit": {"c": 0.5}})",
                           R"({"generation": {"top_p": 0.9}})", R"({"providers": {"llm": {}}})"}) {
    EXPECT_EQ(code_of([&] { (void)PipelineConfig::from_json(nlohmann::json::parse(text)); }), ErrorCode::ConfigError)
        << text;
  }
}

TEST(PipelineConfig, RangeChecks) {
  for (const char* text :
       {R"({"blend_ratio": 1.5})", R"({"gate_threshold": 0})", R"({"gate_threshold": 1})", R"({"w_fb": 0.5})",
        R"({"workers": 0})", R"({"dbscan": {"eps": 2.5}})", R"({"dbscan": {"min_pts": 0}})",
        R"({"bandit": {"epsilon": 2}})", R"({"bandit": {"strategy": "greedy"}})",
        R"({"bandit": {"update_rule": "median"}})", R"({"bandit": {"rounds": 0}})",
        R"({"generation": {"num_candidates": 0}})", R"({"generation": {"temperature": -1}})",
        R"({"blend_ratio": "high"})"}) {
    EXPECT_EQ(code_of([&] { (void)PipelineConfig::from_json(nlohmann::json::parse(text)); }), ErrorCode::ConfigError)
        << text;
  }
}

TEST(PipelineConfig, LoadAllowsCommentsAndReportsBadFiles) {
  vf_test::TempDir dir("config");
  const auto good = dir.path() / "good.json";
  std::ofstream(good) << "{\n  // pipeline\n  \"seed\": 5\n}\n";
  EXPECT_EQ(PipelineConfig::load(good).seed, 5u);
  const auto bad = dir.path() / "bad.json";
  std::ofstream(bad) << "{seed: 5";
  EXPECT_EQ(code_of([&] { (void)PipelineConfig::load(bad); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { (void)PipelineConfig::load(dir.path() / "missing.json"); }), ErrorCode::ConfigError);
}

TEST(PipelineConfig, EndpointsParse) {
  const auto j = nlohmann::json::parse(R"({"providers": {"generator": {"base_url": "http://localhost:9"}}})");
  const PipelineConfig c = PipelineConfig::from_json(j);
  ASSERT_TRUE(c.endpoints.generator.has_value());
  EXPECT_EQ(c.endpoints.generator->base_url, "http://localhost:9");
  EXPECT_FALSE(c.endpoints.complete());
}
