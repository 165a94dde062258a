#pragma once

#include <cstdint>

namespace viewfuse {

/// Unit prices: per rendered image, per 1k input tokens, per 1k output tokens.
struct Prices {
  double image = 0.0;
  double text_in_per_1k = 0.0;
  double text_out_per_1k = 0.0;
};

/// Per object: 30 images (6 views x 5 samples), 4.5k input tokens and 21k
/// output tokens. Throws NegativePrice.
[[nodiscard]] double estimate_cost(std::uint64_t num_objects, const Prices& prices);

}  // namespace viewfuse
