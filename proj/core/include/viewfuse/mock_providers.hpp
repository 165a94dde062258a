#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "viewfuse/providers.hpp"

namespace viewfuse {

/// Deterministic stand-ins for the external models.
///
/// All mocks share one synthetic "world": every word maps to a fixed
/// pseudo-random vector, and texts, images and point clouds embed as the
/// sum of the vectors of the words that describe them. Texts that share
/// content words therefore land close together in every embedding space,
/// and unrelated texts are close to orthogonal.
///
/// Ground truth comes from the object metadata:
///   "mock.truth"          object-level description
///   "mock.truth.<view>"   optional per-view override
///   "mock.cloud_truth"    what the point-cloud encoder perceives
///                         (defaults to the object-level description)
/// Objects without truth get a description synthesized from their id.

inline constexpr std::size_t kMockEmbeddingDim = 96;
inline constexpr std::uint64_t kMockWorldSeed = 0x7669657766757365ULL;

/// Lower-cased alphanumeric words of `text` minus common function words.
/// Falls back to all words when only function words are present.
[[nodiscard]] std::vector<std::string> content_words(std::string_view text);

/// Sum of per-word vectors. Throws EmptyText when `text` has no words.
[[nodiscard]] EmbeddingVector bag_of_words_embedding(std::string_view text,
                                                     std::size_t dim = kMockEmbeddingDim,
                                                     std::uint64_t world_seed = kMockWorldSeed);

/// Two unit vectors whose cosine similarity is exactly `cosine` up to
/// rounding; useful for pinning fixtures.
[[nodiscard]] std::pair<EmbeddingVector, EmbeddingVector> vectors_at_cosine(double cosine, std::size_t dim,
                                                                           std::uint64_t seed);

/// Object-level and per-view ground truth the mocks agree on.
[[nodiscard]] std::string mock_object_truth(const ObjectContext& ctx);
[[nodiscard]] std::string mock_view_truth(const ObjectContext& ctx, Viewpoint view);
[[nodiscard]] std::string mock_cloud_truth(const ObjectContext& ctx);

/// Samples candidates as noisy copies of the view truth. Each candidate
/// draws a hallucination rate that grows with temperature; replaced words
/// get low token probabilities, so confidence tracks fidelity.
class MockCandidateGenerator final : public CandidateGenerator {
 public:
  explicit MockCandidateGenerator(std::uint64_t seed, std::string model_id = "mock-vlm");

  std::vector<CandidateDescription> generate_candidates(const ObjectContext& ctx, Viewpoint view,
                                                        const std::string& image_ref,
                                                        const GenerationConfig& cfg) override;

 private:
  std::uint64_t seed_;
};

/// Bag-of-words text embedder. Individual texts can be pinned to fixed
/// vectors for tests.
class MockTextEmbedder final : public TextEmbedder {
 public:
  explicit MockTextEmbedder(std::string model_id = "mock-text", std::size_t dim = kMockEmbeddingDim);

  EmbeddingVector embed_text(std::string_view text) override;
  void pin(std::string text, EmbeddingVector vector);

 private:
  std::size_t dim_;
  std::mutex mu_;
  std::map<std::string, EmbeddingVector, std::less<>> pinned_;
};

/// Images embed as their view truth.
class MockImageTextEmbedder final : public ImageTextEmbedder {
 public:
  explicit MockImageTextEmbedder(std::string model_id = "mock-clip", std::size_t dim = kMockEmbeddingDim);

  EmbeddingVector embed_image(const ObjectContext& ctx, Viewpoint view, const std::string& image_ref) override;
  EmbeddingVector embed_text(std::string_view text) override;

 private:
  std::size_t dim_;
};

/// Clouds embed as their cloud truth plus a small geometry-dependent term.
class MockCloudTextEmbedder final : public CloudTextEmbedder {
 public:
  explicit MockCloudTextEmbedder(std::string model_id = "mock-cloud", std::size_t dim = kMockEmbeddingDim);

  EmbeddingVector embed_cloud(const ObjectContext& ctx, const PointCloud& cloud) override;
  EmbeddingVector embed_text(std::string_view text) override;

 private:
  std::size_t dim_;
};

/// The four mocks, uncached.
[[nodiscard]] ProviderSet make_mock_providers(std::uint64_t seed);

}  // namespace viewfuse
