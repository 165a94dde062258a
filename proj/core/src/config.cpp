#include "viewfuse/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace viewfuse {

bool ProviderEndpoints::complete() const noexcept {
  return generator && text_embedder && image_embedder && image_text_embedder && cloud_embedder &&
         cloud_text_embedder;
}

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::ConfigError, "unknown key '" + where + key + "'");
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
      if (!it->is_number_unsigned()) throw Error(ErrorCode::ConfigError, where + key + " must be a non-negative integer");
    } else if constexpr (std::is_same_v<T, double>) {
      if (!it->is_number()) throw Error(ErrorCode::ConfigError, where + key + " must be a number");
    }
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::ConfigError, where + key + " has the wrong type");
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::ConfigError, what);
}

bool unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
  reject_unknown(j,
                 {"blend_ratio", "gate_threshold", "w_fb", "seed", "workers", "point_budget", "cache_dir",
                  "include_timings", "mock", "dbscan", "bandit", "generation", "prompts", "providers"},
                 "");
  PipelineConfig c;
  read(j, "blend_ratio", c.blend_ratio, "");
  read(j, "gate_threshold", c.gate_threshold, "");
  read(j, "w_fb", c.w_fb, "");
  read(j, "seed", c.seed, "");
  read(j, "workers", c.workers, "");
  read(j, "point_budget", c.point_budget, "");
  read(j, "include_timings", c.include_timings, "");
  read(j, "mock", c.mock, "");
  if (auto it = j.find("cache_dir"); it != j.end() && !it->is_null()) {
    require(it->is_string(), "cache_dir must be a string");
    c.cache_dir = it->get<std::string>();
  }

  if (auto it = j.find("dbscan"); it != j.end()) {
    reject_unknown(*it, {"eps", "min_pts"}, "dbscan.");
    read(*it, "eps", c.dbscan.eps, "dbscan.");
    read(*it, "min_pts", c.dbscan.min_pts, "dbscan.");
  }
  if (auto it = j.find("bandit"); it != j.end()) {
    reject_unknown(*it,
                   {"strategy", "exploration_weight", "epsilon", "prior_alpha", "prior_beta", "update_rule",
                    "learning_rate", "rounds"},
                   "bandit.");
    std::string strategy(to_string(c.policy.strategy));
    read(*it, "strategy", strategy, "bandit.");
    try {
      c.policy.strategy = parse_strategy(strategy);
    } catch (const Error&) {
      throw Error(ErrorCode::ConfigError, "unknown bandit.strategy '" + strategy + "'");
    }
    read(*it, "exploration_weight", c.policy.exploration_weight, "bandit.");
    read(*it, "epsilon", c.policy.epsilon, "bandit.");
    read(*it, "prior_alpha", c.policy.prior_alpha, "bandit.");
    read(*it, "prior_beta", c.policy.prior_beta, "bandit.");
    read(*it, "learning_rate", c.policy.learning_rate, "bandit.");
    read(*it, "rounds", c.bandit_rounds, "bandit.");
    std::string rule = "exact_mean";
    read(*it, "update_rule", rule, "bandit.");
    if (rule == "exact_mean") {
      c.policy.rule = UpdateRule::ExactMean;
    } else if (rule == "ema") {
      c.policy.rule = UpdateRule::ExponentialMovingAverage;
    } else {
      throw Error(ErrorCode::ConfigError, "bandit.update_rule must be exact_mean or ema");
    }
  }
  if (auto it = j.find("generation"); it != j.end()) {
    reject_unknown(*it, {"temperature", "num_candidates"}, "generation.");
    read(*it, "temperature", c.generation.temperature, "generation.");
    read(*it, "num_candidates", c.generation.num_candidates, "generation.");
  }
  if (auto it = j.find("prompts"); it != j.end()) {
    reject_unknown(*it, {"identification", "attribute_elicitation", "integration"}, "prompts.");
    read(*it, "identification", c.prompts.identification, "prompts.");
    read(*it, "attribute_elicitation", c.prompts.attribute_elicitation, "prompts.");
    read(*it, "integration", c.prompts.integration, "prompts.");
  }
  if (auto it = j.find("providers"); it != j.end()) {
    reject_unknown(*it,
                   {"generator", "text_embedder", "image_embedder", "image_text_embedder", "cloud_embedder",
                    "cloud_text_embedder"},
                   "providers.");
    auto endpoint = [&](const char* key, std::optional<HttpEndpoint>& out) {
      if (auto e = it->find(key); e != it->end() && !e->is_null()) out = HttpEndpoint::from_json(*e);
    };
    endpoint("generator", c.endpoints.generator);
    endpoint("text_embedder", c.endpoints.text_embedder);
    endpoint("image_embedder", c.endpoints.image_embedder);
    endpoint("image_text_embedder", c.endpoints.image_text_embedder);
    endpoint("cloud_embedder", c.endpoints.cloud_embedder);
    endpoint("cloud_text_embedder", c.endpoints.cloud_text_embedder);
  }
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  nlohmann::json j = nlohmann::json::parse(ss.str(), nullptr, /*allow_exceptions=*/false,
                                           /*ignore_comments=*/true);
  if (j.is_discarded()) throw Error(ErrorCode::ConfigError, "config is not valid JSON: " + path.string());
  return from_json(j);
}

nlohmann::json PipelineConfig::to_json() const {
  nlohmann::json j = {
      {"blend_ratio", blend_ratio},
      {"gate_threshold", gate_threshold},
      {"w_fb", w_fb},
      {"seed", seed},
      {"workers", workers},
      {"point_budget", point_budget},
      {"cache_dir", cache_dir ? nlohmann::json(cache_dir->string()) : nlohmann::json(nullptr)},
      {"include_timings", include_timings},
      {"mock", mock},
      {"dbscan", {{"eps", dbscan.eps}, {"min_pts", dbscan.min_pts}}},
      {"bandit",
       {{"strategy", std::string(to_string(policy.strategy))},
        {"exploration_weight", policy.exploration_weight},
        {"epsilon", policy.epsilon},
        {"prior_alpha", policy.prior_alpha},
        {"prior_beta", policy.prior_beta},
        {"update_rule", policy.rule == UpdateRule::ExactMean ? "exact_mean" : "ema"},
        {"learning_rate", policy.learning_rate},
        {"rounds", bandit_rounds}}},
      {"generation", {{"temperature", generation.temperature}, {"num_candidates", generation.num_candidates}}},
      {"prompts",
       {{"identification", prompts.identification},
        {"attribute_elicitation", prompts.attribute_elicitation},
        {"integration", prompts.integration}}}};
  nlohmann::json providers = nlohmann::json::object();
  auto put = [&](const char* key, const std::optional<HttpEndpoint>& e) {
    if (e) providers[key] = e->to_json();
  };
  put("generator", endpoints.generator);
  put("text_embedder", endpoints.text_embedder);
  put("image_embedder", endpoints.image_embedder);
  put("image_text_embedder", endpoints.image_text_embedder);
  put("cloud_embedder", endpoints.cloud_embedder);
  put("cloud_text_embedder", endpoints.cloud_text_embedder);
  j["providers"] = std::move(providers);
  return j;
}

void PipelineConfig::validate() const {
  require(unit(blend_ratio), "blend_ratio must lie in [0,1]");
  require(std::isfinite(gate_threshold) && gate_threshold > 0.0 && gate_threshold < 1.0,
          "gate_threshold must lie in (0,1)");
  require(std::isfinite(w_fb) && w_fb >= 1.0, "w_fb must be >= 1");
  require(workers >= 1 && workers <= 1024, "workers must lie in [1,1024]");
  require(point_budget >= 1, "point_budget must be positive");
  require(std::isfinite(dbscan.eps) && dbscan.eps > 0.0 && dbscan.eps <= 2.0, "dbscan.eps must lie in (0,2]");
  require(dbscan.min_pts >= 1, "dbscan.min_pts must be positive");
  require(std::isfinite(policy.exploration_weight) && policy.exploration_weight >= 0.0,
          "bandit.exploration_weight must be >= 0");
  require(unit(policy.epsilon), "bandit.epsilon must lie in [0,1]");
  require(std::isfinite(policy.prior_alpha) && policy.prior_alpha > 0.0 && std::isfinite(policy.prior_beta) &&
              policy.prior_beta > 0.0,
          "bandit priors must be positive");
  require(std::isfinite(policy.learning_rate) && policy.learning_rate > 0.0 && policy.learning_rate <= 1.0,
          "bandit.learning_rate must lie in (0,1]");
  require(bandit_rounds >= 1, "bandit.rounds must be positive");
  require(std::isfinite(generation.temperature) && generation.temperature >= 0.0 && generation.temperature <= 5.0,
          "generation.temperature must lie in [0,5]");
  require(generation.num_candidates >= 1 && generation.num_candidates <= 64,
          "generation.num_candidates must lie in [1,64]");
}

}  // namespace viewfuse
