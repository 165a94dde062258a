#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "viewfuse/bandit.hpp"
#include "viewfuse/clustering.hpp"
#include "viewfuse/http_provider.hpp"
#include "viewfuse/providers.hpp"

namespace viewfuse {

/// HTTP backends for the four model roles. Image and cloud embedders need a
/// second endpoint for their text tower.
struct ProviderEndpoints {
  std::optional<HttpEndpoint> generator;
  std::optional<HttpEndpoint> text_embedder;
  std::optional<HttpEndpoint> image_embedder;
  std::optional<HttpEndpoint> image_text_embedder;
  std::optional<HttpEndpoint> cloud_embedder;
  std::optional<HttpEndpoint> cloud_text_embedder;

  [[nodiscard]] bool complete() const noexcept;
};

/// Everything a run depends on. Loaded from one JSON file; every key is
/// optional and unknown keys are rejected.
///
///   {
///     "blend_ratio": 0.2,           // confidence vs. relevance mix, [0,1]
///     "gate_threshold": 0.557,      // (0,1)
///     "w_fb": 1.2,                  // front/back priority weight, >= 1
///     "seed": 42,
///     "workers": 1,
///     "point_budget": 10000,
///     "cache_dir": "cache",         // omit or null to disable
///     "include_timings": false,     // write stage timings into records
///     "mock": false,                // use the deterministic mock providers
///     "dbscan": {"eps": 0.15, "min_pts": 2},
///     "bandit": {"strategy": "ucb1", "exploration_weight": 0.5,
///                "epsilon": 0.1, "prior_alpha": 0.1, "prior_beta": 0.1,
///                "update_rule": "exact_mean" | "ema", "learning_rate": 0.1,
///                "rounds": 50},
///     "generation": {"temperature": 0.7, "num_candidates": 5},
///     "prompts": {"identification": "...", "attribute_elicitation": "...",
///                 "integration": "..."},
///     "providers": {"generator": {...}, "text_embedder": {...},
///                   "image_embedder": {...}, "image_text_embedder": {...},
///                   "cloud_embedder": {...}, "cloud_text_embedder": {...}}
///   }
struct PipelineConfig {
  double blend_ratio = 0.2;
  double gate_threshold = 0.557;
  double w_fb = 1.2;
  std::uint64_t seed = 42;
  std::size_t workers = 1;
  std::size_t point_budget = kDefaultPointBudget;
  std::optional<std::filesystem::path> cache_dir;
  bool include_timings = false;
  bool mock = false;
  DbscanParams dbscan;
  PolicyConfig policy;
  std::size_t bandit_rounds = 50;
  GenerationConfig generation;
  PromptTemplates prompts;
  ProviderEndpoints endpoints;

  /// Throws ConfigError.
  [[nodiscard]] static PipelineConfig from_json(const nlohmann::json& j);
  [[nodiscard]] static PipelineConfig load(const std::filesystem::path& path);
  [[nodiscard]] nlohmann::json to_json() const;
  /// Range checks; throws ConfigError.
  void validate() const;
};

}  // namespace viewfuse
