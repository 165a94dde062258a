#pragma once

#include <span>
#include <vector>

#include "viewfuse/model.hpp"

namespace viewfuse {

/// Softmax of image-text cosine similarities over one view's candidates.
struct RelevanceWeights {
  std::vector<double> weights;
  /// Raw cosine similarities the weights were computed from.
  std::vector<double> similarities;
};

/// w_i = exp(cos_i) / sum_k exp(cos_k). Throws EmptyCandidates,
/// DimensionMismatch, ZeroNormVector.
[[nodiscard]] RelevanceWeights relevance_weights(const EmbeddingVector& image_emb,
                                                 std::span<const EmbeddingVector> text_embs);

/// Softmax of precomputed similarities.
[[nodiscard]] std::vector<double> softmax(std::span<const double> values);

/// Restricts weights to `subset` and rescales them to sum to one.
[[nodiscard]] std::vector<double> renormalize_subset(std::span<const double> weights,
                                                     std::span<const std::size_t> subset);

inline constexpr double kDefaultBlendRatio = 0.2;

/// (1 - blend_ratio) * norm_conf + blend_ratio * relevance.
/// Throws OutOfRangeArgument unless every argument lies in [0, 1].
[[nodiscard]] double composite_score(double norm_conf, double relevance, double blend_ratio);

}  // namespace viewfuse

namespace viewfuse {

/// A candidate after clustering and weighting.
struct ScoredCandidate {
  CandidateDescription candidate;
  std::int32_t cluster_id = -1;
  double normalized_confidence = 0.0;
  /// Relevance weight among the view's canonical representatives.
  double relevance_weight = 0.0;
  double composite = 0.0;
};

}  // namespace viewfuse
