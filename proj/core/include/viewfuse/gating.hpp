#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "viewfuse/model.hpp"

namespace viewfuse {

inline constexpr double kDefaultGateThreshold = 0.557;
inline constexpr const char* kBelowGateThreshold = "below_gate_threshold";

struct GatingDecision {
  double similarity = 0.0;
  double threshold = kDefaultGateThreshold;
  /// similarity >= threshold
  bool passed = false;
  std::optional<std::string> flagged_reason;

  friend bool operator==(const GatingDecision&, const GatingDecision&) = default;
};

/// Cosine similarity between annotation text and point cloud embeddings,
/// compared against `threshold`, which must lie in (0, 1).
[[nodiscard]] GatingDecision gate(const EmbeddingVector& text_emb, const EmbeddingVector& cloud_emb,
                                  double threshold);

/// Score models for matching (pos) and mismatched (neg) cloud/text pairs,
/// each a Gaussian truncated to [0, 1]. Sigmas must be positive.
struct TruncatedGaussianPair {
  double mu_pos = 0.65;
  double sigma_pos = 0.1;
  double mu_neg = 0.35;
  double sigma_neg = 0.15;

  /// Throws DegenerateParams on non-finite values or non-positive sigmas.
  void validate() const;
};

/// Coefficients of A a^2 + B a + C = 0 whose roots are the points where the
/// (untruncated) positive and negative densities are equal.
struct ThresholdQuadratic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double discriminant = 0.0;
  /// Root inside (0, 1).
  double root = 0.0;
  /// The other root, when the equation is quadratic and has one.
  std::optional<double> rejected_root;
};

/// Full derivation. With equal sigmas the equation is linear and the root
/// is the midpoint of the means. Throws DegenerateParams (including
/// mu_pos <= mu_neg) or NoRootInUnitInterval.
[[nodiscard]] ThresholdQuadratic derive_optimal_threshold(const TruncatedGaussianPair& params);

[[nodiscard]] double solve_optimal_threshold(const TruncatedGaussianPair& params);

/// Untruncated normal density.
[[nodiscard]] double normal_pdf(double x, double mu, double sigma);
[[nodiscard]] double normal_cdf(double x, double mu, double sigma);
/// Density of N(mu, sigma^2) renormalized over [0, 1]; zero outside.
[[nodiscard]] double truncated_pdf(double x, double mu, double sigma);
[[nodiscard]] double truncated_cdf(double x, double mu, double sigma);

struct ErrorRates {
  /// P(S_pos < threshold)
  double fnr = 0.0;
  /// P(S_neg >= threshold)
  double fpr = 0.0;
  double total = 0.0;
};

/// Rates under the truncated models. Throws OutOfRangeArgument unless the
/// threshold lies in [0, 1].
[[nodiscard]] ErrorRates error_rates(const TruncatedGaussianPair& params, double threshold);

/// D_KL(P_pos || P_neg) between the truncated densities, composite Simpson
/// rule over [0, 1] with `intervals` (even, >= 1000) panels.
[[nodiscard]] double kl_divergence(const TruncatedGaussianPair& params, std::size_t intervals = 4000);

/// Record for the manual-review export, one JSON line per flagged object.
[[nodiscard]] nlohmann::json flagged_record(const std::string& object_id, const GatingDecision& decision,
                                            const std::string& annotation);

}  // namespace viewfuse
