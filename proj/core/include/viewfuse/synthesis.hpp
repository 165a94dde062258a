#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "viewfuse/model.hpp"

namespace viewfuse {

/// The description chosen for one view and its composite score.
struct ViewSelection {
  Viewpoint view = Viewpoint::Front;
  std::string text;
  double score = 0.0;

  friend bool operator==(const ViewSelection&, const ViewSelection&) = default;
};

struct FrontBackSummary {
  /// Front text followed by back text.
  std::string text;
  /// w_fb * mean(front, back) clamped to [0, 1].
  double score = 0.0;
  /// Unclamped weighted value, kept for ranking.
  double raw_priority = 0.0;
};

inline constexpr double kDefaultFrontBackWeight = 1.2;

/// Throws MissingFrontOrBack.
[[nodiscard]] FrontBackSummary prioritize_front_back(std::span<const ViewSelection> selections,
                                                     double w_fb);

/// First sentence of `text`. A sentence ends at '.', '!' or '?' followed by
/// whitespace or end of text, unless the terminator follows a lone letter
/// (an initial such as "J."). Without a terminator the whole text is
/// returned. Throws EmptyText.
[[nodiscard]] std::string extract_core_sentence(std::string_view text);

struct GlobalAnnotation {
  std::string core_sentence;
  std::string supplementary;
  std::string full_text;
  double score_fb = 0.0;
  double score_other = 0.0;
  double score_global = 0.0;
  Viewpoint supplementary_view = Viewpoint::Left;
  /// Selections in canonical view order.
  std::vector<ViewSelection> per_view;

  friend bool operator==(const GlobalAnnotation&, const GlobalAnnotation&) = default;
};

/// Core sentence from the front/back text, plus the best side/top/bottom
/// selection (highest score, then longest text, then canonical order).
/// Throws MissingView.
[[nodiscard]] GlobalAnnotation assemble_global(std::span<const ViewSelection> selections, double w_fb);

}  // namespace viewfuse
