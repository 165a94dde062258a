#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "httplib.h"

#include "error_matchers.hpp"
#include "viewfuse/http_provider.hpp"

using namespace viewfuse;
using vf_test::code_of;

namespace {

/// Local JSON server on an ephemeral port, stopped on destruction.
class LocalServer {
 public:
  LocalServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  [[nodiscard]] std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

HttpEndpoint endpoint_for(const std::string& url, const std::string& path) {
  HttpEndpoint ep;
  ep.base_url = url;
  ep.path = path;
  ep.timeout_ms = 2000;
  return ep;
}

nlohmann::json candidates_body(std::size_t n) {
  nlohmann::json items = nlohmann::json::array();
  for (std::size_t i = 0; i < n; ++i) {
    items.push_back({{"text", "A chair, take " + std::to_string(i) + "."}, {"token_logprobs", {-0.1, -0.2}}});
  }
  return {{"candidates", items}};
}

}  // namespace

TEST(RequestTemplate, TypedAndTextualPlaceholders) {
  const auto tmpl = nlohmann::json::parse(R"({
    "model": "vlm-x",
    "temperature": "{temperature}",
    "n": "{n}",
    "messages": [{"role": "user", "content": "{prompt} [{view}]", "image": "{image}"}],
    "note": "t={temperature}"
  })");
  const nlohmann::json values = {
      {"prompt", "Describe."}, {"view", "left"}, {"image", "img/l.png"}, {"temperature", 0.7}, {"n", 5}};
  const auto out = render_request_template(tmpl, values);
  EXPECT_EQ(out["temperature"], 0.7);
  EXPECT_TRUE(out["n"].is_number_integer());
  EXPECT_EQ(out["n"], 5);
  EXPECT_EQ(out["messages"][0]["content"], "Describe. [left]");
  EXPECT_EQ(out["messages"][0]["image"], "img/l.png");
  EXPECT_EQ(out["note"], "t=0.7");
  EXPECT_EQ(out["model"], "vlm-x");
}

TEST(RequestTemplate, PointsStayAnArray) {
  const auto out = render_request_template({{"cloud", "{points}"}}, {{"points", {{1, 2, 3}, {4, 5, 6}}}});
  ASSERT_TRUE(out["cloud"].is_array());
  EXPECT_EQ(out["cloud"][1][2], 6);
}

TEST(HttpEndpointConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_EQ(code_of([] { (void)HttpEndpoint::from_json({{"base_url", "http://x"}, {"bogus", 1}}); }),
            ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { (void)HttpEndpoint::from_json({{"path", "/v1"}}); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { (void)HttpEndpoint::from_json({{"base_url", "http://x"}, {"retry_attempts", 0}}); }),
            ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { (void)HttpEndpoint::from_json({{"base_url", "http://x"}, {"timeout_ms", "fast"}}); }),
            ErrorCode::ConfigError);
  const auto ep = HttpEndpoint::from_json({{"base_url", "http://x"}, {"retry_backoff_ms", 250}});
  EXPECT_EQ(ep.retry.initial_backoff.count(), 250);
  EXPECT_EQ(HttpEndpoint::from_json(ep.to_json()).to_json(), ep.to_json());
}

TEST(HttpGenerator, ParsesCandidatesAndSendsRenderedBody) {
  LocalServer srv;
  nlohmann::json seen;
  srv.server().Post("/gen", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    res.set_content(candidates_body(seen.at("n").get<std::size_t>()).dump(), "application/json");
  });
  auto ep = endpoint_for(srv.url(), "/gen");
  ep.request_template = {{"prompt", "{prompt}"}, {"n", "{n}"}, {"temperature", "{temperature}"}, {"image", "{image}"}};
  PromptTemplates prompts;
  prompts.identification = "Object in {view}?";
  prompts.attribute_elicitation = "Attributes?";
  prompts.integration = "Sum up.";
  HttpCandidateGenerator gen(ep, prompts);
  GenerationConfig cfg;
  const auto c = gen.generate_candidates({"o", nlohmann::json::object()}, Viewpoint::Right, "r.png", cfg);
  ASSERT_EQ(c.size(), 5u);
  EXPECT_EQ(c[3].text, "A chair, take 3.");
  EXPECT_EQ(c[3].index, 3u);
  EXPECT_EQ(c[3].view, Viewpoint::Right);
  EXPECT_EQ(c[3].token_logprobs, (std::vector<double>{-0.1, -0.2}));
  EXPECT_EQ(seen["prompt"], "Object in right?\n\nAttributes?\n\nSum up.");
  EXPECT_EQ(seen["temperature"], 0.7);
  EXPECT_EQ(seen["image"], "r.png");
  EXPECT_EQ(gen.calls(), 1u);
}

TEST(HttpGenerator, FourOfFiveIsMalformed) {
  LocalServer srv;
  srv.server().Post("/gen", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(candidates_body(4).dump(), "application/json");
  });
  HttpCandidateGenerator gen(endpoint_for(srv.url(), "/gen"), PromptTemplates{});
  EXPECT_EQ(code_of([&] {
              (void)gen.generate_candidates({"o", nlohmann::json::object()}, Viewpoint::Front, "f.png",
                                            GenerationConfig{});
            }),
            ErrorCode::MalformedProviderResponse);
}

TEST(HttpGenerator, NonJsonBodyIsMalformed) {
  LocalServer srv;
  srv.server().Post("/gen", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("<html>", "text/html");
  });
  HttpCandidateGenerator gen(endpoint_for(srv.url(), "/gen"), PromptTemplates{});
  EXPECT_EQ(code_of([&] {
              (void)gen.generate_candidates({"o", nlohmann::json::object()}, Viewpoint::Front, "f.png",
                                            GenerationConfig{});
            }),
            ErrorCode::MalformedProviderResponse);
}

TEST(HttpEmbedder, ReadsPointerAndChecksDimension) {
  LocalServer srv;
  srv.server().Post("/embed", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    const double len = static_cast<double>(body.at("input").get<std::string>().size());
    res.set_content(nlohmann::json{{"data", {{{"embedding", {len, 1.0, 0.0}}}}}}.dump(), "application/json");
  });
  auto ep = endpoint_for(srv.url(), "/embed");
  ep.request_template = {{"input", "{text}"}};
  ep.embedding_pointer = "/data/0/embedding";
  HttpTextEmbedder emb(ep);
  EXPECT_EQ(emb.embed_text("abcd"), EmbeddingVector({4.0, 1.0, 0.0}));
  EXPECT_EQ(code_of([&] { (void)emb.embed_text(""); }), ErrorCode::EmptyText);

  ep.expected_dim = 8;
  HttpTextEmbedder strict(ep);
  EXPECT_EQ(code_of([&] { (void)strict.embed_text("abcd"); }), ErrorCode::DimensionContractViolation);

  ep.expected_dim = 0;
  ep.embedding_pointer = "/nope";
  HttpTextEmbedder wrong(ep);
  EXPECT_EQ(code_of([&] { (void)wrong.embed_text("abcd"); }), ErrorCode::MalformedProviderResponse);
}

TEST(HttpClient, ServerErrorIsNotRetried) {
  LocalServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/x", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 503;
  });
  std::vector<std::chrono::milliseconds> sleeps;
  HttpJsonClient client(endpoint_for(srv.url(), "/x"), [&](auto d) { sleeps.push_back(d); });
  EXPECT_EQ(code_of([&] { (void)client.post({}); }), ErrorCode::ProviderUnavailable);
  EXPECT_EQ(hits.load(), 1);
  EXPECT_TRUE(sleeps.empty());
}

TEST(HttpClient, TransportFailureRetriesWithBackoff) {
  int port = 0;
  {
    // grab a port nobody listens on
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  std::vector<std::chrono::milliseconds> sleeps;
  auto ep = endpoint_for("http://127.0.0.1:" + std::to_string(port), "/x");
  ep.timeout_ms = 300;
  HttpJsonClient client(ep, [&](auto d) { sleeps.push_back(d); });
  try {
    (void)client.post({});
    FAIL() << "expected ProviderUnavailable";
  } catch (const ProviderUnavailable& e) {
    EXPECT_EQ(e.code(), ErrorCode::ProviderUnavailable);
  }
  ASSERT_EQ(sleeps.size(), 2u);
  EXPECT_EQ(sleeps[0].count(), 1000);
  EXPECT_EQ(sleeps[1].count(), 2000);
}

TEST(HttpClient, SendsAuthHeaderFromEnvironment) {
  LocalServer srv;
  std::string auth;
  srv.server().Post("/x", [&](const httplib::Request& req, httplib::Response& res) {
    auth = req.get_header_value("Authorization");
    res.set_content("{}", "application/json");
  });
  ::setenv("VIEWFUSE_TEST_KEY", "sekret", 1);
  auto ep = endpoint_for(srv.url(), "/x");
  ep.api_key_env = "VIEWFUSE_TEST_KEY";
  HttpJsonClient client(ep);
  (void)client.post({});
  EXPECT_EQ(auth, "Bearer sekret");
}

TEST(HttpCloud, SendsPointsArray) {
  LocalServer srv;
  nlohmann::json seen;
  srv.server().Post("/cloud", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    res.set_content(R"({"embedding": [0.5, 0.5]})", "application/json");
  });
  auto cloud_ep = endpoint_for(srv.url(), "/cloud");
  cloud_ep.request_template = {{"points", "{points}"}};
  HttpCloudTextEmbedder emb(cloud_ep, endpoint_for(srv.url(), "/text"));
  PointCloud pc;
  pc.points = {{1, 2, 3}};
  EXPECT_EQ(emb.embed_cloud({"o", nlohmann::json::object()}, pc), EmbeddingVector({0.5, 0.5}));
  EXPECT_EQ(seen["points"], nlohmann::json::parse("[[1.0, 2.0, 3.0]]"));
}
