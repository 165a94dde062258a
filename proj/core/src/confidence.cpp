#include "viewfuse/confidence.hpp"

#include <algorithm>
#include <cmath>

namespace viewfuse {

double compute_raw_confidence(std::span<const double> token_logprobs) {
  if (token_logprobs.empty()) throw Error(ErrorCode::EmptyTokenList, "no token log-probabilities");
  double sum = 0.0;
  for (double lp : token_logprobs) {
    if (!std::isfinite(lp) || lp > 0.0) {
      throw Error(ErrorCode::NonFiniteLogprob, "log-probability must be finite and <= 0");
    }
    sum += -lp;
  }
  return sum / static_cast<double>(token_logprobs.size());
}

double normalize_confidence(double raw) {
  if (!std::isfinite(raw) || raw < 0.0) {
    throw Error(ErrorCode::NegativeRaw, "raw confidence must be finite and >= 0");
  }
  return std::exp(-raw);
}

ConfidenceScore score_confidence(std::span<const double> token_logprobs) {
  const double raw = compute_raw_confidence(token_logprobs);
  return {raw, normalize_confidence(raw)};
}

void assign_confidences(std::vector<CandidateDescription>& candidates) {
  std::vector<double> known;
  for (auto& c : candidates) {
    if (c.token_logprobs.empty()) continue;
    c.raw_confidence = compute_raw_confidence(c.token_logprobs);
    c.confidence_imputed = false;
    known.push_back(c.raw_confidence);
  }
  double fallback = kFallbackRawConfidence;
  if (!known.empty()) {
    std::sort(known.begin(), known.end());
    const std::size_t n = known.size();
    fallback = n % 2 == 1 ? known[n / 2] : 0.5 * (known[n / 2 - 1] + known[n / 2]);
  }
  for (auto& c : candidates) {
    if (!c.token_logprobs.empty()) continue;
    c.raw_confidence = fallback;
    c.confidence_imputed = true;
  }
}

}  // namespace viewfuse
