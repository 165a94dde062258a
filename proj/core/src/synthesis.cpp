#include "viewfuse/synthesis.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace viewfuse {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

std::string trim_copy(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

const ViewSelection* find_view(std::span<const ViewSelection> selections, Viewpoint v) {
  for (const auto& s : selections) {
    if (s.view == v) return &s;
  }
  return nullptr;
}

}  // namespace

FrontBackSummary prioritize_front_back(std::span<const ViewSelection> selections, double w_fb) {
  const ViewSelection* front = find_view(selections, Viewpoint::Front);
  const ViewSelection* back = find_view(selections, Viewpoint::Back);
  if (front == nullptr || back == nullptr) {
    throw Error(ErrorCode::MissingFrontOrBack, front == nullptr ? "front" : "back");
  }
  FrontBackSummary out;
  const std::string f = trim_copy(front->text);
  const std::string b = trim_copy(back->text);
  out.text = f.empty() ? b : (b.empty() ? f : f + " " + b);
  out.raw_priority = w_fb * 0.5 * (front->score + back->score);
  out.score = std::clamp(out.raw_priority, 0.0, 1.0);
  return out;
}

std::string extract_core_sentence(std::string_view text) {
  const std::string trimmed = trim_copy(text);
  if (trimmed.empty()) throw Error(ErrorCode::EmptyText, "no text to extract a sentence from");
  for (std::size_t i = 0; i < trimmed.size(); ++i) {
    const char c = trimmed[i];
    if (c != '.' && c != '!' && c != '?') continue;
    const bool at_boundary = i + 1 == trimmed.size() || is_space(trimmed[i + 1]);
    if (!at_boundary) continue;
    const bool lone_letter = i >= 1 && is_alpha(trimmed[i - 1]) && (i == 1 || !is_alpha(trimmed[i - 2]));
    if (lone_letter) continue;
    return trimmed.substr(0, i + 1);
  }
  return trimmed;
}

GlobalAnnotation assemble_global(std::span<const ViewSelection> selections, double w_fb) {
  GlobalAnnotation g;
  for (Viewpoint v : kAllViewpoints) {
    const ViewSelection* s = find_view(selections, v);
    if (s == nullptr) throw Error(ErrorCode::MissingView, std::string(to_string(v)));
    g.per_view.push_back(*s);
  }

  const FrontBackSummary fb = prioritize_front_back(g.per_view, w_fb);
  g.core_sentence = extract_core_sentence(fb.text);
  g.score_fb = fb.score;

  const ViewSelection* best = nullptr;
  for (Viewpoint v : kSideViewpoints) {
    const ViewSelection* s = find_view(g.per_view, v);
    if (best == nullptr || s->score > best->score ||
        (s->score == best->score && trim_copy(s->text).size() > trim_copy(best->text).size())) {
      best = s;
    }
  }
  g.supplementary = trim_copy(best->text);
  g.supplementary_view = best->view;
  g.score_other = best->score;
  g.full_text = g.supplementary.empty() ? g.core_sentence : g.core_sentence + " " + g.supplementary;
  g.score_global = 0.5 * (g.score_fb + g.score_other);
  return g;
}

}  // namespace viewfuse
