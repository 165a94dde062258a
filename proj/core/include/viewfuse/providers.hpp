#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "viewfuse/model.hpp"

namespace viewfuse {

/// Per-object context forwarded to providers. Real providers ignore it;
/// mocks read their synthetic ground truth from the metadata.
struct ObjectContext {
  std::string object_id;
  nlohmann::json metadata = nlohmann::json::object();
};

enum class PromptPhase { Identification, AttributeElicitation, Integration };

[[nodiscard]] std::string_view to_string(PromptPhase p) noexcept;

struct GenerationConfig {
  double temperature = 0.7;
  std::size_t num_candidates = 5;
  PromptPhase prompt_phase = PromptPhase::Integration;
};

/// Editable prompt templates for the three dialogue phases. `{view}` is
/// replaced by the viewpoint name.
struct PromptTemplates {
  std::string identification =
      "This is the {view} view of a 3D object. Identify the object and its category.";
  std::string attribute_elicitation =
      "Describe its visible attributes from the {view} view: color, material, shape and parts.";
  std::string integration =
      "Combine the identification and attributes into a concise description. "
      "Start with one sentence naming the object.";

  /// Phases up to and including `upto`, joined by blank lines.
  [[nodiscard]] std::string render(PromptPhase upto, Viewpoint view) const;
};

// ── Requests and cache keys ─────────────────────────────────────────────────

enum class ProviderKind { GenerateCandidates, EmbedText, EmbedImage, EmbedCloud };

[[nodiscard]] std::string_view to_string(ProviderKind k) noexcept;

struct ProviderRequest {
  ProviderKind kind = ProviderKind::EmbedText;
  std::string model_id;
  /// Canonical payload; object keys are sorted so dumps are stable.
  nlohmann::json payload;
  /// Hex FNV-1a of kind, model id and payload.
  std::string cache_key;
  /// Independent hash of the same bytes, stored with cache entries to
  /// detect key collisions and tampering.
  std::string digest;

  [[nodiscard]] static ProviderRequest make(ProviderKind kind, std::string model_id,
                                            nlohmann::json payload);
};

// ── Provider interfaces ─────────────────────────────────────────────────────

/// Common bookkeeping: model identity and a thread-safe call counter.
class ProviderBase {
 public:
  explicit ProviderBase(std::string model_id) : model_id_(std::move(model_id)) {}
  virtual ~ProviderBase() = default;
  ProviderBase(const ProviderBase&) = delete;
  ProviderBase& operator=(const ProviderBase&) = delete;

  [[nodiscard]] const std::string& model_id() const noexcept { return model_id_; }
  /// Number of times the provider did real work (not cache hits).
  [[nodiscard]] std::uint64_t calls() const noexcept { return calls_.load(); }

 protected:
  void count_call() noexcept { calls_.fetch_add(1); }

 private:
  std::string model_id_;
  std::atomic<std::uint64_t> calls_{0};
};

class CandidateGenerator : public ProviderBase {
 public:
  using ProviderBase::ProviderBase;
  /// Exactly cfg.num_candidates candidates, indices 0..M-1. Candidates may
  /// have empty token_logprobs when the backend cannot supply them.
  virtual std::vector<CandidateDescription> generate_candidates(const ObjectContext& ctx, Viewpoint view,
                                                                const std::string& image_ref,
                                                                const GenerationConfig& cfg) = 0;
};

/// Sentence embedder used for clustering.
class TextEmbedder : public ProviderBase {
 public:
  using ProviderBase::ProviderBase;
  virtual EmbeddingVector embed_text(std::string_view text) = 0;
};

/// Joint image/text space used for relevance weighting.
class ImageTextEmbedder : public ProviderBase {
 public:
  using ProviderBase::ProviderBase;
  virtual EmbeddingVector embed_image(const ObjectContext& ctx, Viewpoint view,
                                      const std::string& image_ref) = 0;
  virtual EmbeddingVector embed_text(std::string_view text) = 0;
};

/// Joint point-cloud/text space used by the gate.
class CloudTextEmbedder : public ProviderBase {
 public:
  using ProviderBase::ProviderBase;
  virtual EmbeddingVector embed_cloud(const ObjectContext& ctx, const PointCloud& cloud) = 0;
  virtual EmbeddingVector embed_text(std::string_view text) = 0;
};

struct ProviderSet {
  std::shared_ptr<CandidateGenerator> generator;
  std::shared_ptr<TextEmbedder> text;
  std::shared_ptr<ImageTextEmbedder> image;
  std::shared_ptr<CloudTextEmbedder> cloud;
  /// The providers that do real work, for call accounting. When caching
  /// wraps the four above, these are the wrapped backends.
  std::vector<std::shared_ptr<ProviderBase>> backends;

  [[nodiscard]] std::uint64_t backend_calls() const;
};

// ── Serialization shared by the cache and HTTP layers ──────────────────────

[[nodiscard]] nlohmann::json candidates_to_json(const std::vector<CandidateDescription>& candidates);
/// Throws MalformedProviderResponse.
[[nodiscard]] std::vector<CandidateDescription> candidates_from_json(const nlohmann::json& j, Viewpoint view);
[[nodiscard]] nlohmann::json embedding_to_json(const EmbeddingVector& e);
/// Throws MalformedProviderResponse or DimensionContractViolation.
[[nodiscard]] EmbeddingVector embedding_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json point_cloud_payload(const PointCloud& cloud);

/// Rejects empty or whitespace-only text with EmptyText.
void require_text(std::string_view text);

}  // namespace viewfuse
