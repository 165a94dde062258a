#include "viewfuse/mock_providers.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <set>

#include "viewfuse/random.hpp"

namespace viewfuse {

namespace {

const std::set<std::string, std::less<>>& stopwords() {
  static const std::set<std::string, std::less<>> words = {
      "a",   "an",  "the", "of",   "with", "and",  "is",   "are", "on",   "in",  "it",
      "its", "to",  "from", "this", "that", "has", "have", "at",  "by",   "as",  "for",
      "or",  "be",  "some", "there", "which", "while", "into", "onto", "also"};
  return words;
}

constexpr std::array<std::string_view, 16> kColors = {
    "red",   "blue",  "green", "yellow", "black",  "white", "silver", "golden",
    "brown", "orange", "purple", "gray", "pink", "teal", "beige", "crimson"};
constexpr std::array<std::string_view, 12> kMaterials = {
    "wooden", "ceramic", "metal", "plastic", "glass", "leather",
    "stone",  "fabric",  "rubber", "bamboo", "marble", "steel"};
constexpr std::array<std::string_view, 20> kNouns = {
    "mug",   "chair",  "lamp",   "vase",   "robot",  "car",    "teapot",
    "boot",  "guitar", "clock",  "helmet", "bench",  "kettle", "drone",
    "sofa",  "barrel", "bicycle", "camera", "statue", "backpack"};
constexpr std::array<std::string_view, 16> kParts = {
    "handle", "base", "lid",  "panel", "edge",  "corner", "strap", "wheel",
    "knob",   "label", "seam", "rim",  "hinge", "vent",  "spout", "leg"};
constexpr std::array<std::string_view, 12> kShapes = {
    "curved", "flat", "rounded", "textured", "smooth", "ridged",
    "glossy", "matte", "worn",   "narrow",   "wide",   "tapered"};
constexpr std::array<std::string_view, 24> kHallucinations = {
    "dragon", "window", "feather", "cactus", "anchor", "violin", "rocket", "pillow",
    "banana", "castle", "spider",  "ribbon", "planet", "tulip",  "laptop", "saddle",
    "zipper", "cloud",  "crown",   "ladder", "parrot", "shovel", "candle", "trophy"};

template <std::size_t N>
std::string_view pick(const std::array<std::string_view, N>& arr, Rng& rng) {
  return arr[rng.index(N)];
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string lower_alnum(std::string_view token) {
  std::string w;
  for (char c : token) {
    if (std::isalnum(static_cast<unsigned char>(c))) w += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return w;
}

void add_word_vector(std::vector<double>& acc, std::string_view word, std::uint64_t world_seed) {
  Rng rng(derive_seed(world_seed, word));
  for (double& v : acc) v += rng.normal();
}

}  // namespace

std::vector<std::string> content_words(std::string_view text) {
  std::vector<std::string> all;
  std::vector<std::string> content;
  for (const auto& tok : split_tokens(text)) {
    std::string w = lower_alnum(tok);
    if (w.empty()) continue;
    if (!stopwords().contains(w)) content.push_back(w);
    all.push_back(std::move(w));
  }
  return content.empty() ? all : content;
}

EmbeddingVector bag_of_words_embedding(std::string_view text, std::size_t dim, std::uint64_t world_seed) {
  const auto words = content_words(text);
  if (words.empty()) throw Error(ErrorCode::EmptyText, "text has no words to embed");
  std::vector<double> acc(dim, 0.0);
  for (const auto& w : words) add_word_vector(acc, w, world_seed);
  return EmbeddingVector(std::move(acc));
}

std::pair<EmbeddingVector, EmbeddingVector> vectors_at_cosine(double cosine, std::size_t dim, std::uint64_t seed) {
  if (dim < 2 || !(cosine >= -1.0 && cosine <= 1.0)) {
    throw Error(ErrorCode::OutOfRangeArgument, "need dim >= 2 and cosine in [-1,1]");
  }
  Rng rng(seed);
  std::vector<double> a(dim);
  std::vector<double> r(dim);
  for (double& v : a) v = rng.normal();
  for (double& v : r) v = rng.normal();
  auto normalize = [](std::vector<double>& v) {
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    for (double& x : v) x /= n;
  };
  normalize(a);
  double dot = 0.0;
  for (std::size_t i = 0; i < dim; ++i) dot += a[i] * r[i];
  for (std::size_t i = 0; i < dim; ++i) r[i] -= dot * a[i];
  normalize(r);
  const double s = std::sqrt(std::max(0.0, 1.0 - cosine * cosine));
  std::vector<double> b(dim);
  for (std::size_t i = 0; i < dim; ++i) b[i] = cosine * a[i] + s * r[i];
  return {EmbeddingVector(std::move(a)), EmbeddingVector(std::move(b))};
}

std::string mock_object_truth(const ObjectContext& ctx) {
  if (auto t = metadata_string(ctx.metadata, "mock.truth")) return *t;
  Rng rng(derive_seed(kMockWorldSeed, "object|" + ctx.object_id));
  std::string s = "A ";
  s += pick(kColors, rng);
  s += ' ';
  s += pick(kMaterials, rng);
  s += ' ';
  s += pick(kNouns, rng);
  s += '.';
  return s;
}

std::string mock_view_truth(const ObjectContext& ctx, Viewpoint view) {
  if (auto t = metadata_string(ctx.metadata, "mock.truth." + std::string(to_string(view)))) return *t;
  Rng rng(derive_seed(kMockWorldSeed, "view|" + ctx.object_id + "|" + std::string(to_string(view))));
  std::string detail = "The ";
  detail += to_string(view);
  detail += " shows a ";
  detail += pick(kShapes, rng);
  detail += ' ';
  detail += pick(kParts, rng);
  detail += '.';
  return mock_object_truth(ctx) + " " + detail;
}

std::string mock_cloud_truth(const ObjectContext& ctx) {
  if (auto t = metadata_string(ctx.metadata, "mock.cloud_truth")) return *t;
  return mock_object_truth(ctx);
}

MockCandidateGenerator::MockCandidateGenerator(std::uint64_t seed, std::string model_id)
    : CandidateGenerator(std::move(model_id)), seed_(seed) {}

std::vector<CandidateDescription> MockCandidateGenerator::generate_candidates(const ObjectContext& ctx,
                                                                              Viewpoint view,
                                                                              const std::string& /*image_ref*/,
                                                                              const GenerationConfig& cfg) {
  count_call();
  if (cfg.num_candidates == 0) throw Error(ErrorCode::OutOfRangeArgument, "num_candidates must be positive");
  const std::string truth = mock_view_truth(ctx, view);
  const auto tokens = split_tokens(truth);
  // index of the first token that starts the final sentence, for dropping details
  std::size_t last_sentence = 0;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    const char c = tokens[i].back();
    if (c == '.' || c == '!' || c == '?') last_sentence = i + 1;
  }

  Rng rng(derive_seed(seed_, ctx.object_id + "|" + std::string(to_string(view)) + "|" +
                                 fmt_double(cfg.temperature) + "|" + std::to_string(cfg.num_candidates) +
                                 "|" + std::string(to_string(cfg.prompt_phase))));
  const double heat = std::max(0.0, cfg.temperature) / 0.7;

  std::vector<CandidateDescription> out;
  out.reserve(cfg.num_candidates);
  for (std::size_t m = 0; m < cfg.num_candidates; ++m) {
    const double u = rng.uniform();
    const double rate = std::min(0.9, heat * 0.45 * u * u);
    const bool drop_detail = last_sentence > 0 && rng.uniform() < rate * 0.5;
    const std::size_t end = drop_detail ? last_sentence : tokens.size();

    CandidateDescription c;
    c.view = view;
    c.index = m;
    for (std::size_t i = 0; i < end; ++i) {
      std::string tok = tokens[i];
      const std::string word = lower_alnum(tok);
      const bool content = !word.empty() && !stopwords().contains(word);
      double logprob = -(0.01 + 0.25 * rate * rng.uniform());
      if (content && rng.uniform() < rate) {
        std::string replacement(pick(kHallucinations, rng));
        const char tail = tok.back();
        if (!std::isalnum(static_cast<unsigned char>(tail))) replacement += tail;
        if (std::isupper(static_cast<unsigned char>(tok.front()))) replacement = capitalize(replacement);
        tok = std::move(replacement);
        logprob = -(1.5 + 1.5 * rng.uniform());
      }
      if (!c.text.empty()) c.text += ' ';
      c.text += tok;
      c.token_logprobs.push_back(logprob);
    }
    out.push_back(std::move(c));
  }
  return out;
}

MockTextEmbedder::MockTextEmbedder(std::string model_id, std::size_t dim)
    : TextEmbedder(std::move(model_id)), dim_(dim) {}

EmbeddingVector MockTextEmbedder::embed_text(std::string_view text) {
  count_call();
  require_text(text);
  {
    std::lock_guard lock(mu_);
    if (auto it = pinned_.find(text); it != pinned_.end()) return it->second;
  }
  return bag_of_words_embedding(text, dim_);
}

void MockTextEmbedder::pin(std::string text, EmbeddingVector vector) {
  std::lock_guard lock(mu_);
  pinned_.insert_or_assign(std::move(text), std::move(vector));
}

MockImageTextEmbedder::MockImageTextEmbedder(std::string model_id, std::size_t dim)
    : ImageTextEmbedder(std::move(model_id)), dim_(dim) {}

EmbeddingVector MockImageTextEmbedder::embed_image(const ObjectContext& ctx, Viewpoint view,
                                                   const std::string& /*image_ref*/) {
  count_call();
  return bag_of_words_embedding(mock_view_truth(ctx, view), dim_);
}

EmbeddingVector MockImageTextEmbedder::embed_text(std::string_view text) {
  count_call();
  require_text(text);
  return bag_of_words_embedding(text, dim_);
}

MockCloudTextEmbedder::MockCloudTextEmbedder(std::string model_id, std::size_t dim)
    : CloudTextEmbedder(std::move(model_id)), dim_(dim) {}

EmbeddingVector MockCloudTextEmbedder::embed_cloud(const ObjectContext& ctx, const PointCloud& cloud) {
  count_call();
  if (cloud.points.empty()) throw Error(ErrorCode::EmptyPointCloud, "cannot embed an empty cloud");
  const EmbeddingVector base = bag_of_words_embedding(mock_cloud_truth(ctx), dim_);

  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& p : cloud.points) {
    for (double coord : {p.x, p.y, p.z}) {
      char bytes[sizeof(double)];
      std::memcpy(bytes, &coord, sizeof(double));
      h = fnv1a64(std::string_view(bytes, sizeof bytes), h);
    }
  }
  Rng rng(h);
  std::vector<double> v(base.values().begin(), base.values().end());
  const double scale = 0.05 * base.norm() / std::sqrt(static_cast<double>(dim_));
  for (double& x : v) x += scale * rng.normal();
  return EmbeddingVector(std::move(v));
}

EmbeddingVector MockCloudTextEmbedder::embed_text(std::string_view text) {
  count_call();
  require_text(text);
  return bag_of_words_embedding(text, dim_);
}

ProviderSet make_mock_providers(std::uint64_t seed) {
  ProviderSet set;
  set.generator = std::make_shared<MockCandidateGenerator>(seed, "mock-vlm/" + std::to_string(seed));
  set.text = std::make_shared<MockTextEmbedder>();
  set.image = std::make_shared<MockImageTextEmbedder>();
  set.cloud = std::make_shared<MockCloudTextEmbedder>();
  set.backends = {set.generator, set.text, set.image, set.cloud};
  return set;
}

}  // namespace viewfuse
