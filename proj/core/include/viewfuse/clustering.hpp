#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "viewfuse/model.hpp"

namespace viewfuse {

/// Throws DimensionMismatch or ZeroNormVector.
[[nodiscard]] double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// 1 - cosine_similarity.
[[nodiscard]] double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b);

inline constexpr std::int32_t kNoise = -1;

struct ClusterAssignment {
  std::size_t candidate_index = 0;
  /// >= 0, or kNoise.
  std::int32_t cluster_id = kNoise;

  [[nodiscard]] bool is_noise() const noexcept { return cluster_id == kNoise; }
  friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

struct DbscanParams {
  double eps = 0.15;
  std::size_t min_pts = 2;
};

/// DBSCAN over cosine distance. A point is core when at least `min_pts`
/// points (itself included) lie within `eps`. Points are visited in index
/// order, so cluster ids are assigned in order of each cluster's lowest
/// core point and border points join the first cluster that reaches them.
///
/// Throws EmptyInput, InvalidEps, DimensionMismatch, ZeroNormVector.
[[nodiscard]] std::vector<ClusterAssignment> dbscan_cluster(std::span<const EmbeddingVector> embeddings,
                                                            const DbscanParams& params);

/// One representative per cluster plus each noise point on its own.
struct CanonicalSet {
  /// Candidate indices sorted ascending.
  std::vector<std::size_t> representatives;
};

/// Argmax by score within each cluster, lowest index on ties.
/// Throws LengthMismatch.
[[nodiscard]] CanonicalSet select_canonical(std::span<const ClusterAssignment> assignments,
                                            std::span<const double> scores);

}  // namespace viewfuse
