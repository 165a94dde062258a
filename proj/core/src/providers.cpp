#include "viewfuse/providers.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

#include "viewfuse/random.hpp"

namespace viewfuse {

std::string_view to_string(PromptPhase p) noexcept {
  switch (p) {
    case PromptPhase::Identification: return "identification";
    case PromptPhase::AttributeElicitation: return "attribute_elicitation";
    case PromptPhase::Integration: return "integration";
  }
  return "integration";
}

namespace {

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string PromptTemplates::render(PromptPhase upto, Viewpoint view) const {
  const std::string name(to_string(view));
  std::string out = replace_all(identification, "{view}", name);
  if (upto == PromptPhase::Identification) return out;
  out += "\n\n" + replace_all(attribute_elicitation, "{view}", name);
  if (upto == PromptPhase::AttributeElicitation) return out;
  out += "\n\n" + replace_all(integration, "{view}", name);
  return out;
}

std::string_view to_string(ProviderKind k) noexcept {
  switch (k) {
    case ProviderKind::GenerateCandidates: return "generate_candidates";
    case ProviderKind::EmbedText: return "embed_text";
    case ProviderKind::EmbedImage: return "embed_image";
    case ProviderKind::EmbedCloud: return "embed_cloud";
  }
  return "embed_text";
}

ProviderRequest ProviderRequest::make(ProviderKind kind, std::string model_id, nlohmann::json payload) {
  ProviderRequest r;
  r.kind = kind;
  r.model_id = std::move(model_id);
  r.payload = std::move(payload);
  std::string bytes(to_string(kind));
  bytes += '\x1f';
  bytes += r.model_id;
  bytes += '\x1f';
  bytes += r.payload.dump();
  r.cache_key = hex64(fnv1a64(bytes));
  r.digest = hex64(fnv1a64(bytes, 0x84222325cbf29ce4ULL));
  return r;
}

std::uint64_t ProviderSet::backend_calls() const {
  std::uint64_t total = 0;
  for (const auto& b : backends) total += b->calls();
  return total;
}

nlohmann::json candidates_to_json(const std::vector<CandidateDescription>& candidates) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : candidates) {
    arr.push_back({{"index", c.index}, {"text", c.text}, {"token_logprobs", c.token_logprobs}});
  }
  return arr;
}

std::vector<CandidateDescription> candidates_from_json(const nlohmann::json& j, Viewpoint view) {
  if (!j.is_array()) throw Error(ErrorCode::MalformedProviderResponse, "candidates must be an array");
  std::vector<CandidateDescription> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& item = j[i];
    if (!item.is_object() || !item.contains("text") || !item["text"].is_string()) {
      throw Error(ErrorCode::MalformedProviderResponse, "candidate " + std::to_string(i) + " lacks text");
    }
    CandidateDescription c;
    c.view = view;
    c.index = i;
    c.text = item["text"].get<std::string>();
    if (c.text.empty()) throw Error(ErrorCode::MalformedProviderResponse, "candidate text is empty");
    if (auto lp = item.find("token_logprobs"); lp != item.end() && !lp->is_null()) {
      if (!lp->is_array()) throw Error(ErrorCode::MalformedProviderResponse, "token_logprobs must be an array");
      for (const auto& v : *lp) {
        if (!v.is_number()) throw Error(ErrorCode::MalformedProviderResponse, "token logprob is not a number");
        const double d = v.get<double>();
        if (!std::isfinite(d) || d > 0.0) {
          throw Error(ErrorCode::MalformedProviderResponse, "token logprob must be finite and <= 0");
        }
        c.token_logprobs.push_back(d);
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

nlohmann::json embedding_to_json(const EmbeddingVector& e) {
  return nlohmann::json(std::vector<double>(e.values().begin(), e.values().end()));
}

EmbeddingVector embedding_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::MalformedProviderResponse, "embedding must be an array");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) throw Error(ErrorCode::MalformedProviderResponse, "embedding entry is not a number");
    v.push_back(x.get<double>());
  }
  return EmbeddingVector(std::move(v));
}

nlohmann::json point_cloud_payload(const PointCloud& cloud) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : cloud.points) arr.push_back({p.x, p.y, p.z});
  return arr;
}

void require_text(std::string_view text) {
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) return;
  }
  throw Error(ErrorCode::EmptyText, "text is empty");
}

}  // namespace viewfuse
