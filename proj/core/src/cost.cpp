#include "viewfuse/cost.hpp"

#include <cmath>

#include "viewfuse/error.hpp"

namespace viewfuse {

double estimate_cost(std::uint64_t num_objects, const Prices& p) {
  for (double v : {p.image, p.text_in_per_1k, p.text_out_per_1k}) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::NegativePrice, "prices must be finite and >= 0");
  }
  const double per_object = 30.0 * p.image + 5.0 * p.text_in_per_1k + 21.0 * p.text_out_per_1k;
  return per_object * static_cast<double>(num_objects);
}

}  // namespace viewfuse
