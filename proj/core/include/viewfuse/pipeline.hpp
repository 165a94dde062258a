#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "viewfuse/bandit.hpp"
#include "viewfuse/cache.hpp"
#include "viewfuse/clustering.hpp"
#include "viewfuse/config.hpp"
#include "viewfuse/gating.hpp"
#include "viewfuse/model.hpp"
#include "viewfuse/providers.hpp"
#include "viewfuse/scoring.hpp"
#include "viewfuse/synthesis.hpp"

namespace viewfuse {

// ── Per-view aggregation ────────────────────────────────────────────────────

/// A canonical representative competing as a bandit arm.
struct ArmRecord {
  std::size_t candidate_index = 0;
  /// Relevance weight renormalized over the representatives.
  double relevance_weight = 0.0;
  double composite = 0.0;

  friend bool operator==(const ArmRecord&, const ArmRecord&) = default;
};

struct BanditTrace {
  std::vector<std::size_t> selections;
  std::vector<double> rewards;

  friend bool operator==(const BanditTrace&, const BanditTrace&) = default;
};

struct ViewRecord {
  Viewpoint view = Viewpoint::Front;
  /// All candidates; relevance and composite here use the softmax over
  /// every candidate of the view, which is what picks representatives.
  std::vector<ScoredCandidate> candidates;
  std::vector<ClusterAssignment> clusters;
  std::vector<ArmRecord> arms;
  BanditTrace trace;
  std::vector<std::uint64_t> pulls;
  std::size_t selected_arm = 0;
  ViewSelection selection;
};

struct AggregationParams {
  double blend_ratio = kDefaultBlendRatio;
  DbscanParams dbscan;
  PolicyConfig policy;
  std::size_t rounds = 50;
};

struct ViewInputs {
  Viewpoint view = Viewpoint::Front;
  /// raw_confidence must already be assigned.
  std::vector<CandidateDescription> candidates;
  /// Sentence embeddings for clustering, aligned with candidates.
  std::vector<EmbeddingVector> cluster_embeddings;
  /// Joint-space text embeddings for relevance, aligned with candidates.
  std::vector<EmbeddingVector> relevance_embeddings;
  EmbeddingVector image_embedding;
};

/// Clustering, canonical selection, relevance weighting and the bandit
/// rounds for one view. The emitted arm is the most pulled one (ties: higher
/// mean, then lower index).
[[nodiscard]] ViewRecord aggregate_view(const ViewInputs& inputs, const AggregationParams& params, Rng& rng);

// ── Records ─────────────────────────────────────────────────────────────────

struct StageTimings {
  double data_preparation_ms = 0.0;
  double annotation_ms = 0.0;
  double aggregation_ms = 0.0;
  double synthesis_ms = 0.0;
  double gating_ms = 0.0;

  StageTimings& operator+=(const StageTimings& o);
};

enum class RecordStatus { Ok, Failed };

struct AnnotationRecord {
  std::string object_id;
  RecordStatus status = RecordStatus::Ok;
  std::string error;
  double w_fb = kDefaultFrontBackWeight;
  std::vector<ViewRecord> views;
  GlobalAnnotation global;
  GatingDecision gating;
  std::optional<EmbeddingVector> gate_text_embedding;
  std::optional<EmbeddingVector> gate_cloud_embedding;
  StageTimings timings;

  [[nodiscard]] bool ok() const noexcept { return status == RecordStatus::Ok; }
  [[nodiscard]] nlohmann::json to_json(bool include_timings) const;
  /// Throws ParseError.
  [[nodiscard]] static AnnotationRecord from_json(const nlohmann::json& j);
};

/// Recomputes synthesis and gating from what the record stores.
struct ReplayResult {
  GlobalAnnotation global;
  GatingDecision gating;
};
[[nodiscard]] ReplayResult replay_record(const AnnotationRecord& record);

// ── Orchestration ───────────────────────────────────────────────────────────

/// Mock or HTTP providers per the config, wrapped in the response cache
/// when cache_dir is set. Throws ConfigError when HTTP endpoints are missing.
[[nodiscard]] ProviderSet make_providers(const PipelineConfig& cfg,
                                         std::shared_ptr<ResponseCache>* cache_out = nullptr);

/// All four stages for one object. Errors propagate to the caller.
[[nodiscard]] AnnotationRecord annotate_object(const ObjectManifest& manifest, const PipelineConfig& cfg,
                                               ProviderSet& providers);

struct RunStats {
  std::size_t objects = 0;
  std::size_t succeeded = 0;
  std::size_t failed = 0;
  std::size_t flagged = 0;
  double wall_seconds = 0.0;
  StageTimings totals;
  std::uint64_t provider_calls = 0;
  std::optional<CacheStats> cache;
};

struct RunResult {
  /// Sorted by object_id.
  std::vector<AnnotationRecord> records;
  /// flagged.jsonl lines, sorted by object_id.
  std::vector<nlohmann::json> flagged;
  RunStats stats;
};

/// Annotates every manifest on `cfg.workers` threads. Per-object failures
/// become failed records.
[[nodiscard]] RunResult run_pipeline(std::span<const ObjectManifest> corpus, const PipelineConfig& cfg,
                                     ProviderSet& providers);

/// Ingests every *.json manifest in `dir` (non-recursive) and annotates it.
/// Manifests that fail to ingest become failed records keyed by file stem.
[[nodiscard]] RunResult run_corpus(const std::filesystem::path& dir, const PipelineConfig& cfg,
                                   ProviderSet& providers);

/// Writes records/<object_id>.json, flagged.jsonl and run_summary.json.
void write_outputs(const RunResult& result, const std::filesystem::path& out_dir, bool include_timings);

[[nodiscard]] nlohmann::json run_summary_json(const RunResult& result);

}  // namespace viewfuse
