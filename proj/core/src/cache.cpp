#include "viewfuse/cache.hpp"

#include <fstream>
#include <sstream>
#include <thread>

namespace viewfuse {

namespace fs = std::filesystem;

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  for (ProviderKind k : {ProviderKind::GenerateCandidates, ProviderKind::EmbedText,
                         ProviderKind::EmbedImage, ProviderKind::EmbedCloud}) {
    if (ec) break;
    fs::create_directories(dir_ / std::string(to_string(k)), ec);
  }
  if (ec) throw Error(ErrorCode::CacheDirUnwritable, dir_.string() + ": " + ec.message());
  // probe writability
  const fs::path probe = dir_ / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw Error(ErrorCode::CacheDirUnwritable, dir_.string());
  }
  fs::remove(probe, ec);
}

fs::path ResponseCache::entry_path(const ProviderRequest& req) const {
  return dir_ / std::string(to_string(req.kind)) / (req.cache_key + ".json");
}

CacheStats ResponseCache::stats() const noexcept {
  return {hits_.load(), misses_.load(), corruptions_.load()};
}

nlohmann::json ResponseCache::cached_call(const ProviderRequest& req,
                                          const std::function<nlohmann::json()>& backing) {
  const fs::path path = entry_path(req);
  std::ifstream in(path, std::ios::binary);
  if (in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    in.close();
    nlohmann::json entry = nlohmann::json::parse(ss.str(), nullptr, /*allow_exceptions=*/false);
    const bool valid = entry.is_object() && entry.contains("response") &&
                       entry.value("digest", std::string{}) == req.digest &&
                       entry.value("model", std::string{}) == req.model_id;
    if (valid) {
      hits_.fetch_add(1);
      return entry["response"];
    }
    corruptions_.fetch_add(1);
  }
  misses_.fetch_add(1);
  nlohmann::json response = backing();
  store(req, response);
  return response;
}

void ResponseCache::store(const ProviderRequest& req, const nlohmann::json& response) {
  const fs::path path = entry_path(req);
  nlohmann::json entry = {{"kind", std::string(to_string(req.kind))},
                          {"model", req.model_id},
                          {"cache_key", req.cache_key},
                          {"digest", req.digest},
                          {"response", response}};
  std::ostringstream name;
  name << path.filename().string() << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id())
       << '.' << tmp_counter_.fetch_add(1);
  const fs::path tmp = path.parent_path() / name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::CacheDirUnwritable, tmp.string());
    out << entry.dump(1);
    if (!out) throw Error(ErrorCode::CacheDirUnwritable, tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::CacheDirUnwritable, path.string());
  }
}

namespace {

nlohmann::json context_payload(const ObjectContext& ctx) {
  return {{"object_id", ctx.object_id}, {"metadata", ctx.metadata}};
}

class CachedGenerator final : public CandidateGenerator {
 public:
  CachedGenerator(std::shared_ptr<CandidateGenerator> inner, std::shared_ptr<ResponseCache> cache)
      : CandidateGenerator(inner->model_id()), inner_(std::move(inner)), cache_(std::move(cache)) {}

  std::vector<CandidateDescription> generate_candidates(const ObjectContext& ctx, Viewpoint view,
                                                        const std::string& image_ref,
                                                        const GenerationConfig& cfg) override {
    auto req = ProviderRequest::make(ProviderKind::GenerateCandidates, model_id(),
                                     {{"context", context_payload(ctx)},
                                      {"view", std::string(to_string(view))},
                                      {"image", image_ref},
                                      {"temperature", cfg.temperature},
                                      {"n", cfg.num_candidates},
                                      {"phase", std::string(to_string(cfg.prompt_phase))}});
    auto response = cache_->cached_call(req, [&] {
      return candidates_to_json(inner_->generate_candidates(ctx, view, image_ref, cfg));
    });
    return candidates_from_json(response, view);
  }

 private:
  std::shared_ptr<CandidateGenerator> inner_;
  std::shared_ptr<ResponseCache> cache_;
};

class CachedTextEmbedder final : public TextEmbedder {
 public:
  CachedTextEmbedder(std::shared_ptr<TextEmbedder> inner, std::shared_ptr<ResponseCache> cache)
      : TextEmbedder(inner->model_id()), inner_(std::move(inner)), cache_(std::move(cache)) {}

  EmbeddingVector embed_text(std::string_view text) override {
    auto req = ProviderRequest::make(ProviderKind::EmbedText, model_id(), {{"text", std::string(text)}});
    return embedding_from_json(
        cache_->cached_call(req, [&] { return embedding_to_json(inner_->embed_text(text)); }));
  }

 private:
  std::shared_ptr<TextEmbedder> inner_;
  std::shared_ptr<ResponseCache> cache_;
};

class CachedImageTextEmbedder final : public ImageTextEmbedder {
 public:
  CachedImageTextEmbedder(std::shared_ptr<ImageTextEmbedder> inner, std::shared_ptr<ResponseCache> cache)
      : ImageTextEmbedder(inner->model_id()), inner_(std::move(inner)), cache_(std::move(cache)) {}

  EmbeddingVector embed_image(const ObjectContext& ctx, Viewpoint view, const std::string& image_ref) override {
    auto req = ProviderRequest::make(
        ProviderKind::EmbedImage, model_id(),
        {{"context", context_payload(ctx)}, {"view", std::string(to_string(view))}, {"image", image_ref}});
    return embedding_from_json(cache_->cached_call(
        req, [&] { return embedding_to_json(inner_->embed_image(ctx, view, image_ref)); }));
  }

  EmbeddingVector embed_text(std::string_view text) override {
    auto req = ProviderRequest::make(ProviderKind::EmbedText, model_id(), {{"text", std::string(text)}});
    return embedding_from_json(
        cache_->cached_call(req, [&] { return embedding_to_json(inner_->embed_text(text)); }));
  }

 private:
  std::shared_ptr<ImageTextEmbedder> inner_;
  std::shared_ptr<ResponseCache> cache_;
};

class CachedCloudTextEmbedder final : public CloudTextEmbedder {
 public:
  CachedCloudTextEmbedder(std::shared_ptr<CloudTextEmbedder> inner, std::shared_ptr<ResponseCache> cache)
      : CloudTextEmbedder(inner->model_id()), inner_(std::move(inner)), cache_(std::move(cache)) {}

  EmbeddingVector embed_cloud(const ObjectContext& ctx, const PointCloud& cloud) override {
    auto req = ProviderRequest::make(ProviderKind::EmbedCloud, model_id(),
                                     {{"context", context_payload(ctx)}, {"points", point_cloud_payload(cloud)}});
    return embedding_from_json(
        cache_->cached_call(req, [&] { return embedding_to_json(inner_->embed_cloud(ctx, cloud)); }));
  }

  EmbeddingVector embed_text(std::string_view text) override {
    auto req = ProviderRequest::make(ProviderKind::EmbedText, model_id(), {{"text", std::string(text)}});
    return embedding_from_json(
        cache_->cached_call(req, [&] { return embedding_to_json(inner_->embed_text(text)); }));
  }

 private:
  std::shared_ptr<CloudTextEmbedder> inner_;
  std::shared_ptr<ResponseCache> cache_;
};

}  // namespace

ProviderSet with_cache(const ProviderSet& backends, std::shared_ptr<ResponseCache> cache) {
  ProviderSet out;
  out.generator = std::make_shared<CachedGenerator>(backends.generator, cache);
  out.text = std::make_shared<CachedTextEmbedder>(backends.text, cache);
  out.image = std::make_shared<CachedImageTextEmbedder>(backends.image, cache);
  out.cloud = std::make_shared<CachedCloudTextEmbedder>(backends.cloud, cache);
  out.backends = backends.backends;
  return out;
}

}  // namespace viewfuse
