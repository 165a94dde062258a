#include "viewfuse/http_provider.hpp"

#include <cstdlib>
#include <set>
#include <thread>

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

namespace viewfuse {

namespace {

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::ConfigError, std::string("endpoint field '") + key + "' has the wrong type");
  }
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

nlohmann::json pointer_get(const nlohmann::json& body, const std::string& pointer) {
  try {
    return body.at(nlohmann::json::json_pointer(pointer));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedProviderResponse, "response lacks " + pointer + ": " + e.what());
  }
}

EmbeddingVector read_embedding(const nlohmann::json& body, const HttpEndpoint& ep) {
  EmbeddingVector v = embedding_from_json(pointer_get(body, ep.embedding_pointer));
  if (ep.expected_dim != 0 && v.dim() != ep.expected_dim) {
    throw Error(ErrorCode::DimensionContractViolation,
                "expected dim " + std::to_string(ep.expected_dim) + ", got " + std::to_string(v.dim()));
  }
  return v;
}

}  // namespace

HttpEndpoint HttpEndpoint::from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "base_url",        "path",           "model_id",          "auth_header",   "auth_prefix",
      "api_key_env",     "request_template", "candidates_pointer", "text_field",  "logprobs_field",
      "embedding_pointer", "expected_dim", "timeout_ms",        "retry_attempts", "retry_backoff_ms"};
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "endpoint must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::ConfigError, "unknown endpoint key '" + key + "'");
  }
  HttpEndpoint ep;
  read_field(j, "base_url", ep.base_url);
  read_field(j, "path", ep.path);
  read_field(j, "model_id", ep.model_id);
  read_field(j, "auth_header", ep.auth_header);
  read_field(j, "auth_prefix", ep.auth_prefix);
  read_field(j, "api_key_env", ep.api_key_env);
  read_field(j, "request_template", ep.request_template);
  read_field(j, "candidates_pointer", ep.candidates_pointer);
  read_field(j, "text_field", ep.text_field);
  read_field(j, "logprobs_field", ep.logprobs_field);
  read_field(j, "embedding_pointer", ep.embedding_pointer);
  read_field(j, "expected_dim", ep.expected_dim);
  read_field(j, "timeout_ms", ep.timeout_ms);
  read_field(j, "retry_attempts", ep.retry.attempts);
  std::int64_t backoff = ep.retry.initial_backoff.count();
  read_field(j, "retry_backoff_ms", backoff);
  ep.retry.initial_backoff = std::chrono::milliseconds(backoff);
  if (ep.base_url.empty()) throw Error(ErrorCode::ConfigError, "endpoint base_url is required");
  if (ep.retry.attempts < 1 || backoff < 0 || ep.timeout_ms <= 0) {
    throw Error(ErrorCode::ConfigError, "endpoint retry/timeout values out of range");
  }
  return ep;
}

nlohmann::json HttpEndpoint::to_json() const {
  return {{"base_url", base_url},
          {"path", path},
          {"model_id", model_id},
          {"auth_header", auth_header},
          {"auth_prefix", auth_prefix},
          {"api_key_env", api_key_env},
          {"request_template", request_template},
          {"candidates_pointer", candidates_pointer},
          {"text_field", text_field},
          {"logprobs_field", logprobs_field},
          {"embedding_pointer", embedding_pointer},
          {"expected_dim", expected_dim},
          {"timeout_ms", timeout_ms},
          {"retry_attempts", retry.attempts},
          {"retry_backoff_ms", retry.initial_backoff.count()}};
}

nlohmann::json render_request_template(const nlohmann::json& tmpl, const nlohmann::json& values) {
  if (tmpl.is_object()) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [k, v] : tmpl.items()) out[k] = render_request_template(v, values);
    return out;
  }
  if (tmpl.is_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : tmpl) out.push_back(render_request_template(v, values));
    return out;
  }
  if (!tmpl.is_string()) return tmpl;

  const auto& s = tmpl.get_ref<const std::string&>();
  // whole-value placeholders keep their JSON type
  for (const auto& [name, value] : values.items()) {
    if (s == "{" + name + "}" && !value.is_string()) return value;
  }
  std::string rendered = s;
  for (const auto& [name, value] : values.items()) {
    const std::string placeholder = "{" + name + "}";
    if (rendered.find(placeholder) == std::string::npos) continue;
    const std::string text = value.is_string() ? value.get<std::string>() : value.dump();
    rendered = replace_all(std::move(rendered), placeholder, text);
  }
  return rendered;
}

HttpJsonClient::HttpJsonClient(HttpEndpoint endpoint, Sleeper sleeper)
    : endpoint_(std::move(endpoint)), sleeper_(std::move(sleeper)) {
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

HttpJsonClient::~HttpJsonClient() = default;

nlohmann::json HttpJsonClient::post(const nlohmann::json& body) {
  httplib::Headers headers;
  if (!endpoint_.api_key_env.empty()) {
    if (const char* key = std::getenv(endpoint_.api_key_env.c_str())) {
      headers.emplace(endpoint_.auth_header, endpoint_.auth_prefix + key);
    }
  }
  const std::string payload = body.dump();
  auto backoff = endpoint_.retry.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= endpoint_.retry.attempts; ++attempt) {
    httplib::Client client(endpoint_.base_url);
    client.set_connection_timeout(std::chrono::milliseconds(endpoint_.timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(endpoint_.timeout_ms));
    client.set_write_timeout(std::chrono::milliseconds(endpoint_.timeout_ms));
    auto res = client.Post(endpoint_.path, headers, payload, "application/json");
    if (res) {
      if (res->status < 200 || res->status >= 300) {
        throw ProviderUnavailable(endpoint_.base_url + endpoint_.path + " returned HTTP " +
                                  std::to_string(res->status));
      }
      nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, /*allow_exceptions=*/false);
      if (parsed.is_discarded()) {
        throw Error(ErrorCode::MalformedProviderResponse, "response body is not JSON");
      }
      return parsed;
    }
    last_error = httplib::to_string(res.error());
    if (attempt < endpoint_.retry.attempts) {
      sleeper_(backoff);
      backoff *= 2;
    }
  }
  throw ProviderUnavailable(endpoint_.base_url + endpoint_.path + ": " + last_error + " after " +
                            std::to_string(endpoint_.retry.attempts) + " attempts");
}

HttpCandidateGenerator::HttpCandidateGenerator(HttpEndpoint endpoint, PromptTemplates prompts,
                                               HttpJsonClient::Sleeper sleeper)
    : CandidateGenerator(endpoint.model_id), client_(std::move(endpoint), std::move(sleeper)),
      prompts_(std::move(prompts)) {}

std::vector<CandidateDescription> HttpCandidateGenerator::generate_candidates(const ObjectContext& /*ctx*/,
                                                                              Viewpoint view,
                                                                              const std::string& image_ref,
                                                                              const GenerationConfig& cfg) {
  count_call();
  const nlohmann::json values = {{"image", image_ref},
                                 {"prompt", prompts_.render(cfg.prompt_phase, view)},
                                 {"view", std::string(to_string(view))},
                                 {"temperature", cfg.temperature},
                                 {"n", cfg.num_candidates}};
  const auto& ep = client_.endpoint();
  const nlohmann::json body = client_.post(render_request_template(ep.request_template, values));
  const nlohmann::json items = pointer_get(body, ep.candidates_pointer);
  if (!items.is_array()) throw Error(ErrorCode::MalformedProviderResponse, "candidates are not an array");
  if (items.size() != cfg.num_candidates) {
    throw Error(ErrorCode::MalformedProviderResponse, "expected " + std::to_string(cfg.num_candidates) +
                                                          " candidates, got " + std::to_string(items.size()));
  }
  nlohmann::json normalized = nlohmann::json::array();
  for (const auto& item : items) {
    nlohmann::json c = nlohmann::json::object();
    if (item.is_string()) {
      c["text"] = item;
    } else if (item.is_object()) {
      if (item.contains(ep.text_field)) c["text"] = item[ep.text_field];
      if (item.contains(ep.logprobs_field)) c["token_logprobs"] = item[ep.logprobs_field];
    }
    normalized.push_back(std::move(c));
  }
  return candidates_from_json(normalized, view);
}

HttpTextEmbedder::HttpTextEmbedder(HttpEndpoint endpoint, HttpJsonClient::Sleeper sleeper)
    : TextEmbedder(endpoint.model_id), client_(std::move(endpoint), std::move(sleeper)) {}

EmbeddingVector HttpTextEmbedder::embed_text(std::string_view text) {
  count_call();
  require_text(text);
  const auto& ep = client_.endpoint();
  return read_embedding(client_.post(render_request_template(ep.request_template, {{"text", std::string(text)}})), ep);
}

HttpImageTextEmbedder::HttpImageTextEmbedder(HttpEndpoint image_endpoint, HttpEndpoint text_endpoint,
                                             HttpJsonClient::Sleeper sleeper)
    : ImageTextEmbedder(image_endpoint.model_id),
      image_client_(std::move(image_endpoint), sleeper),
      text_client_(std::move(text_endpoint), sleeper) {}

EmbeddingVector HttpImageTextEmbedder::embed_image(const ObjectContext& /*ctx*/, Viewpoint view,
                                                   const std::string& image_ref) {
  count_call();
  const auto& ep = image_client_.endpoint();
  const nlohmann::json values = {{"image", image_ref}, {"view", std::string(to_string(view))}};
  return read_embedding(image_client_.post(render_request_template(ep.request_template, values)), ep);
}

EmbeddingVector HttpImageTextEmbedder::embed_text(std::string_view text) {
  count_call();
  require_text(text);
  const auto& ep = text_client_.endpoint();
  return read_embedding(text_client_.post(render_request_template(ep.request_template, {{"text", std::string(text)}})), ep);
}

HttpCloudTextEmbedder::HttpCloudTextEmbedder(HttpEndpoint cloud_endpoint, HttpEndpoint text_endpoint,
                                             HttpJsonClient::Sleeper sleeper)
    : CloudTextEmbedder(cloud_endpoint.model_id),
      cloud_client_(std::move(cloud_endpoint), sleeper),
      text_client_(std::move(text_endpoint), sleeper) {}

EmbeddingVector HttpCloudTextEmbedder::embed_cloud(const ObjectContext& /*ctx*/, const PointCloud& cloud) {
  count_call();
  const auto& ep = cloud_client_.endpoint();
  return read_embedding(cloud_client_.post(render_request_template(ep.request_template, {{"points", point_cloud_payload(cloud)}})), ep);
}

EmbeddingVector HttpCloudTextEmbedder::embed_text(std::string_view text) {
  count_call();
  require_text(text);
  const auto& ep = text_client_.endpoint();
  return read_embedding(text_client_.post(render_request_template(ep.request_template, {{"text", std::string(text)}})), ep);
}

}  // namespace viewfuse
