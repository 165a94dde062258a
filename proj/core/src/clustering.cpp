#include "viewfuse/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

namespace viewfuse {

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "dims " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::ZeroNormVector, "cosine of a zero vector");
  auto av = a.values();
  auto bv = b.values();
  double dot = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) dot += av[i] * bv[i];
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  return 1.0 - cosine_similarity(a, b);
}

std::vector<ClusterAssignment> dbscan_cluster(std::span<const EmbeddingVector> embeddings,
                                              const DbscanParams& params) {
  if (embeddings.empty()) throw Error(ErrorCode::EmptyInput, "no embeddings to cluster");
  if (!(params.eps > 0.0) || !std::isfinite(params.eps)) {
    throw Error(ErrorCode::InvalidEps, "eps must be positive");
  }
  const std::size_t n = embeddings.size();
  const std::size_t min_pts = std::max<std::size_t>(params.min_pts, 1);

  // n is a handful of candidates per view; a dense neighbor table is fine.
  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || cosine_distance(embeddings[i], embeddings[j]) <= params.eps) {
        neighbors[i].push_back(j);
      }
    }
  }

  constexpr std::int32_t kUnvisited = -2;
  std::vector<std::int32_t> label(n, kUnvisited);
  std::int32_t next_cluster = 0;

  for (std::size_t p = 0; p < n; ++p) {
    if (label[p] != kUnvisited) continue;
    if (neighbors[p].size() < min_pts) {
      label[p] = kNoise;
      continue;
    }
    const std::int32_t cid = next_cluster++;
    label[p] = cid;
    std::deque<std::size_t> frontier(neighbors[p].begin(), neighbors[p].end());
    while (!frontier.empty()) {
      const std::size_t q = frontier.front();
      frontier.pop_front();
      if (label[q] == kNoise) label[q] = cid;  // border point
      if (label[q] != kUnvisited) continue;
      label[q] = cid;
      if (neighbors[q].size() >= min_pts) {
        frontier.insert(frontier.end(), neighbors[q].begin(), neighbors[q].end());
      }
    }
  }

  std::vector<ClusterAssignment> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({i, label[i]});
  return out;
}

CanonicalSet select_canonical(std::span<const ClusterAssignment> assignments,
                              std::span<const double> scores) {
  if (assignments.size() != scores.size()) {
    throw Error(ErrorCode::LengthMismatch, "assignments and scores differ in length");
  }
  std::map<std::int32_t, std::size_t> best;  // cluster id -> candidate index
  CanonicalSet out;
  for (const auto& a : assignments) {
    if (a.candidate_index >= scores.size()) {
      throw Error(ErrorCode::LengthMismatch, "candidate index beyond score list");
    }
    if (a.is_noise()) {
      out.representatives.push_back(a.candidate_index);
      continue;
    }
    auto [it, inserted] = best.try_emplace(a.cluster_id, a.candidate_index);
    if (inserted) continue;
    const std::size_t cur = it->second;
    const double s = scores[a.candidate_index];
    if (s > scores[cur] || (s == scores[cur] && a.candidate_index < cur)) {
      it->second = a.candidate_index;
    }
  }
  for (const auto& [cid, idx] : best) out.representatives.push_back(idx);
  std::sort(out.representatives.begin(), out.representatives.end());
  return out;
}

}  // namespace viewfuse
