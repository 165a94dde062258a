#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

#include "corpus.hpp"
#include "error_matchers.hpp"
#include "viewfuse/mock_providers.hpp"
#include "viewfuse/pipeline.hpp"

using namespace viewfuse;
using vf_test::code_of;

namespace {

PipelineConfig mock_config(std::uint64_t seed = 42) {
  PipelineConfig cfg;
  cfg.mock = true;
  cfg.seed = seed;
  return cfg;
}

std::vector<std::string> record_dumps(const RunResult& r) {
  std::vector<std::string> out;
  for (const auto& rec : r.records) out.push_back(rec.to_json(false).dump());
  return out;
}

}  // namespace

TEST(Pipeline, SingleObjectIsDeterministic) {
  vf_test::CorpusShape shape;
  shape.objects = 1;
  const auto manifests = make_manifests(shape);
  const PipelineConfig cfg = mock_config();
  auto p1 = make_providers(cfg);
  auto p2 = make_providers(cfg);
  const AnnotationRecord a = annotate_object(manifests[0], cfg, p1);
  const AnnotationRecord b = annotate_object(manifests[0], cfg, p2);
  EXPECT_EQ(a.to_json(false), b.to_json(false));
  ASSERT_EQ(a.views.size(), 6u);
  for (const auto& v : a.views) {
    EXPECT_EQ(v.candidates.size(), 5u);
    EXPECT_EQ(v.trace.selections.size(), 50u);
    std::uint64_t total = 0;
    for (auto n : v.pulls) total += n;
    EXPECT_EQ(total, 50u);
    EXPECT_LT(v.selected_arm, v.arms.size());
    EXPECT_EQ(v.selection.text, v.candidates[v.arms[v.selected_arm].candidate_index].candidate.text);
  }
  EXPECT_FALSE(a.global.core_sentence.empty());
  EXPECT_TRUE(a.gating.passed);
  EXPECT_FALSE(a.gating.flagged_reason.has_value());
}

TEST(Pipeline, SeedChangesTheBanditTrace) {
  vf_test::CorpusShape shape;
  shape.objects = 1;
  const auto manifests = make_manifests(shape);
  auto p1 = make_providers(mock_config(1));
  auto p2 = make_providers(mock_config(2));
  const auto a = annotate_object(manifests[0], mock_config(1), p1);
  const auto b = annotate_object(manifests[0], mock_config(2), p2);
  EXPECT_NE(a.to_json(false), b.to_json(false));
}

TEST(Pipeline, MisalignedObjectsAreFlagged) {
  vf_test::CorpusShape shape;
  shape.objects = 6;
  shape.misaligned = {1, 4};
  const auto manifests = make_manifests(shape);
  const PipelineConfig cfg = mock_config();
  auto providers = make_providers(cfg);
  const RunResult r = run_pipeline(manifests, cfg, providers);
  EXPECT_EQ(r.stats.succeeded, 6u);
  EXPECT_EQ(r.stats.flagged, 2u);
  ASSERT_EQ(r.flagged.size(), 2u);
  EXPECT_EQ(r.flagged[0].at("object_id"), vf_test::synthetic_id(1));
  EXPECT_EQ(r.flagged[1].at("object_id"), vf_test::synthetic_id(4));
  for (const auto& rec : r.records) {
    const bool bad = rec.object_id == vf_test::synthetic_id(1) || rec.object_id == vf_test::synthetic_id(4);
    EXPECT_EQ(rec.gating.passed, !bad) << rec.object_id;
  }
}

TEST(Pipeline, CorruptManifestBecomesOneFailure) {
  vf_test::TempDir dir("pipeline-corpus");
  vf_test::CorpusShape shape;
  shape.objects = 100;
  const auto paths = vf_test::write_corpus(dir.path(), shape);
  std::ofstream(paths[37], std::ios::trunc) << "{\"object_id\": \"broken\", \"views\": ";
  const PipelineConfig cfg = mock_config();
  auto providers = make_providers(cfg);
  const RunResult r = run_corpus(dir.path(), cfg, providers);
  EXPECT_EQ(r.stats.objects, 100u);
  EXPECT_EQ(r.stats.succeeded, 99u);
  EXPECT_EQ(r.stats.failed, 1u);
  std::size_t failed = 0;
  for (const auto& rec : r.records) {
    if (rec.ok()) continue;
    ++failed;
    EXPECT_EQ(rec.object_id, vf_test::synthetic_id(37));
    EXPECT_FALSE(rec.error.empty());
  }
  EXPECT_EQ(failed, 1u);
  const auto summary = run_summary_json(r);
  EXPECT_EQ(summary.at("failures").size(), 1u);
}

TEST(Pipeline, RecordRoundTripAndReplay) {
  vf_test::CorpusShape shape;
  shape.objects = 2;
  shape.misaligned = {1};
  const auto manifests = make_manifests(shape);
  const PipelineConfig cfg = mock_config();
  auto providers = make_providers(cfg);
  for (const auto& m : manifests) {
    const AnnotationRecord rec = annotate_object(m, cfg, providers);
    const auto j = rec.to_json(true);
    const AnnotationRecord back = AnnotationRecord::from_json(j);
    EXPECT_EQ(back.to_json(true), j);
    const ReplayResult replay = replay_record(back);
    EXPECT_EQ(replay.global, rec.global);
    EXPECT_EQ(replay.gating, rec.gating);
  }
  EXPECT_EQ(code_of([] { (void)AnnotationRecord::from_json(nlohmann::json::parse(R"({"views": 3})")); }),
            ErrorCode::ParseError);
}

TEST(Pipeline, CacheIsTransparent) {
  vf_test::TempDir dir("pipeline-cache");
  vf_test::CorpusShape shape;
  shape.objects = 4;
  shape.misaligned = {2};
  const auto manifests = make_manifests(shape);
  PipelineConfig plain = mock_config();
  auto p0 = make_providers(plain);
  const auto uncached = run_pipeline(manifests, plain, p0);

  PipelineConfig cached = plain;
  cached.cache_dir = dir.path() / "cache";
  auto p1 = make_providers(cached);
  const auto cold = run_pipeline(manifests, cached, p1);
  EXPECT_GT(cold.stats.provider_calls, 0u);
  std::shared_ptr<ResponseCache> cache;
  auto p2 = make_providers(cached, &cache);
  const auto warm = run_pipeline(manifests, cached, p2);
  EXPECT_EQ(warm.stats.provider_calls, 0u);
  ASSERT_TRUE(cache);
  EXPECT_EQ(cache->stats().misses, 0u);
  EXPECT_GT(cache->stats().hits, 0u);

  EXPECT_EQ(record_dumps(uncached), record_dumps(cold));
  EXPECT_EQ(record_dumps(cold), record_dumps(warm));
}

TEST(Pipeline, WorkerCountDoesNotChangeOutput) {
  vf_test::CorpusShape shape;
  shape.objects = 8;
  shape.misaligned = {3};
  const auto manifests = make_manifests(shape);
  PipelineConfig one = mock_config();
  PipelineConfig four = mock_config();
  four.workers = 4;
  auto p1 = make_providers(one);
  auto p4 = make_providers(four);
  const auto a = run_pipeline(manifests, one, p1);
  const auto b = run_pipeline(manifests, four, p4);
  EXPECT_EQ(record_dumps(a), record_dumps(b));
  EXPECT_EQ(a.flagged, b.flagged);
}

TEST(Pipeline, WritesOutputFiles) {
  vf_test::TempDir dir("pipeline-out");
  vf_test::CorpusShape shape;
  shape.objects = 3;
  shape.misaligned = {0};
  const auto manifests = make_manifests(shape);
  const PipelineConfig cfg = mock_config();
  auto providers = make_providers(cfg);
  const auto r = run_pipeline(manifests, cfg, providers);
  write_outputs(r, dir.path(), false);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto path = dir.path() / "records" / (vf_test::synthetic_id(i) + ".json");
    ASSERT_TRUE(std::filesystem::exists(path));
    const auto j = nlohmann::json::parse(vf_test::read_text(path));
    EXPECT_EQ(j.at("object_id"), vf_test::synthetic_id(i));
    EXPECT_FALSE(j.contains("timings"));
  }
  const std::string flagged = vf_test::read_text(dir.path() / "flagged.jsonl");
  EXPECT_EQ(std::count(flagged.begin(), flagged.end(), '\n'), 1);
  EXPECT_EQ(nlohmann::json::parse(flagged.substr(0, flagged.find('\n'))).at("object_id"), vf_test::synthetic_id(0));
  const auto summary = nlohmann::json::parse(vf_test::read_text(dir.path() / "run_summary.json"));
  EXPECT_EQ(summary.at("objects"), 3);
  EXPECT_EQ(summary.at("flagged"), 1);
  EXPECT_TRUE(summary.at("cache").is_null());
}

TEST(Pipeline, SingleCandidateDegradesToOneArm) {
  vf_test::CorpusShape shape;
  shape.objects = 1;
  const auto manifests = make_manifests(shape);
  PipelineConfig cfg = mock_config();
  cfg.generation.num_candidates = 1;
  auto providers = make_providers(cfg);
  const auto rec = annotate_object(manifests[0], cfg, providers);
  for (const auto& v : rec.views) {
    ASSERT_EQ(v.arms.size(), 1u);
    EXPECT_EQ(v.selected_arm, 0u);
    EXPECT_EQ(v.pulls[0], 50u);
    EXPECT_DOUBLE_EQ(v.arms[0].relevance_weight, 1.0);
  }
}

TEST(Pipeline, HttpWithoutEndpointsIsAConfigError) {
  PipelineConfig cfg;
  EXPECT_EQ(code_of([&] { (void)make_providers(cfg); }), ErrorCode::ConfigError);
}
