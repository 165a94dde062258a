#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "viewfuse/providers.hpp"

namespace viewfuse {

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
};

/// A generic JSON-over-HTTP model endpoint.
///
/// The request body is `request_template` with placeholders substituted in
/// every string value:
///   {image} {prompt} {view} {text}   replaced textually
///   "{temperature}" "{n}"            a value that is exactly the
///   "{points}"                       placeholder becomes a JSON number
///                                    (or the [[x,y,z],...] array)
/// Responses are read with JSON pointers.
struct HttpEndpoint {
  /// scheme://host[:port]
  std::string base_url;
  std::string path = "/";
  std::string model_id = "http";
  /// Header carrying the key read from `api_key_env`; skipped when unset.
  std::string auth_header = "Authorization";
  std::string auth_prefix = "Bearer ";
  std::string api_key_env;
  nlohmann::json request_template = nlohmann::json::object();
  /// Generator responses: array of candidate objects.
  std::string candidates_pointer = "/candidates";
  std::string text_field = "text";
  std::string logprobs_field = "token_logprobs";
  /// Embedding responses: array of numbers.
  std::string embedding_pointer = "/embedding";
  /// 0 accepts any dimension.
  std::size_t expected_dim = 0;
  int timeout_ms = 60'000;
  RetryPolicy retry;

  /// Throws ConfigError on unknown keys or wrong types.
  [[nodiscard]] static HttpEndpoint from_json(const nlohmann::json& j);
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Substitutes placeholders as described on HttpEndpoint.
[[nodiscard]] nlohmann::json render_request_template(const nlohmann::json& tmpl, const nlohmann::json& values);

/// POSTs JSON with the endpoint's retry policy. Transport failures are
/// retried with exponential backoff; a non-2xx status or an unparseable
/// body is reported without retrying.
class HttpJsonClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit HttpJsonClient(HttpEndpoint endpoint, Sleeper sleeper = {});
  ~HttpJsonClient();
  HttpJsonClient(const HttpJsonClient&) = delete;
  HttpJsonClient& operator=(const HttpJsonClient&) = delete;

  nlohmann::json post(const nlohmann::json& body);
  [[nodiscard]] const HttpEndpoint& endpoint() const noexcept { return endpoint_; }

 private:
  HttpEndpoint endpoint_;
  Sleeper sleeper_;
};

class HttpCandidateGenerator final : public CandidateGenerator {
 public:
  HttpCandidateGenerator(HttpEndpoint endpoint, PromptTemplates prompts, HttpJsonClient::Sleeper sleeper = {});

  /// Throws MalformedProviderResponse when the count differs from M.
  std::vector<CandidateDescription> generate_candidates(const ObjectContext& ctx, Viewpoint view,
                                                        const std::string& image_ref,
                                                        const GenerationConfig& cfg) override;

 private:
  HttpJsonClient client_;
  PromptTemplates prompts_;
};

class HttpTextEmbedder final : public TextEmbedder {
 public:
  explicit HttpTextEmbedder(HttpEndpoint endpoint, HttpJsonClient::Sleeper sleeper = {});
  EmbeddingVector embed_text(std::string_view text) override;

 private:
  HttpJsonClient client_;
};

class HttpImageTextEmbedder final : public ImageTextEmbedder {
 public:
  HttpImageTextEmbedder(HttpEndpoint image_endpoint, HttpEndpoint text_endpoint,
                        HttpJsonClient::Sleeper sleeper = {});
  EmbeddingVector embed_image(const ObjectContext& ctx, Viewpoint view, const std::string& image_ref) override;
  EmbeddingVector embed_text(std::string_view text) override;

 private:
  HttpJsonClient image_client_;
  HttpJsonClient text_client_;
};

class HttpCloudTextEmbedder final : public CloudTextEmbedder {
 public:
  HttpCloudTextEmbedder(HttpEndpoint cloud_endpoint, HttpEndpoint text_endpoint,
                        HttpJsonClient::Sleeper sleeper = {});
  EmbeddingVector embed_cloud(const ObjectContext& ctx, const PointCloud& cloud) override;
  EmbeddingVector embed_text(std::string_view text) override;

 private:
  HttpJsonClient cloud_client_;
  HttpJsonClient text_client_;
};

}  // namespace viewfuse
