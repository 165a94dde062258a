#pragma once

#include <span>
#include <vector>

#include "viewfuse/model.hpp"

namespace viewfuse {

/// Raw (lower is more confident) and normalized (higher is better) forms.
struct ConfidenceScore {
  double raw = 0.0;
  double normalized = 1.0;
};

/// Mean negative log-likelihood per token: (1/N) * sum |logprob_i|.
/// Throws EmptyTokenList, NonFiniteLogprob (also for positive entries).
[[nodiscard]] double compute_raw_confidence(std::span<const double> token_logprobs);

/// exp(-raw). Throws NegativeRaw for raw < 0 or non-finite raw.
[[nodiscard]] double normalize_confidence(double raw);

[[nodiscard]] ConfidenceScore score_confidence(std::span<const double> token_logprobs);

/// Raw confidence assigned to candidates whose provider gave no token
/// probabilities when none of their siblings have any either.
inline constexpr double kFallbackRawConfidence = 1.0;

/// Fills raw_confidence on every candidate of one view. Candidates without
/// logprobs get the median raw confidence of those that have them, or
/// kFallbackRawConfidence, and are marked confidence_imputed.
void assign_confidences(std::vector<CandidateDescription>& candidates);

}  // namespace viewfuse
