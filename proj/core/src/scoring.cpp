#include "viewfuse/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "viewfuse/clustering.hpp"

namespace viewfuse {

std::vector<double> softmax(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyCandidates, "softmax of nothing");
  const double hi = *std::max_element(values.begin(), values.end());
  std::vector<double> out(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = std::exp(values[i] - hi);
    total += out[i];
  }
  for (double& w : out) w /= total;
  return out;
}

RelevanceWeights relevance_weights(const EmbeddingVector& image_emb,
                                   std::span<const EmbeddingVector> text_embs) {
  if (text_embs.empty()) throw Error(ErrorCode::EmptyCandidates, "no candidate texts to weight");
  RelevanceWeights rw;
  rw.similarities.reserve(text_embs.size());
  for (const auto& t : text_embs) rw.similarities.push_back(cosine_similarity(image_emb, t));
  rw.weights = softmax(rw.similarities);
  return rw;
}

std::vector<double> renormalize_subset(std::span<const double> weights,
                                       std::span<const std::size_t> subset) {
  if (subset.empty()) throw Error(ErrorCode::EmptyCandidates, "empty subset");
  double total = 0.0;
  for (std::size_t i : subset) {
    if (i >= weights.size()) throw Error(ErrorCode::LengthMismatch, "subset index out of range");
    total += weights[i];
  }
  std::vector<double> out;
  out.reserve(subset.size());
  for (std::size_t i : subset) out.push_back(weights[i] / total);
  return out;
}

double composite_score(double norm_conf, double relevance, double blend_ratio) {
  auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!in_unit(norm_conf) || !in_unit(relevance) || !in_unit(blend_ratio)) {
    throw Error(ErrorCode::OutOfRangeArgument, "composite score arguments must lie in [0,1]");
  }
  if (blend_ratio == 0.0) return norm_conf;
  if (blend_ratio == 1.0) return relevance;
  return (1.0 - blend_ratio) * norm_conf + blend_ratio * relevance;
}

}  // namespace viewfuse
