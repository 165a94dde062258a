#include "viewfuse/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "viewfuse/error.hpp"

namespace viewfuse {

namespace {

[[noreturn]] void bad_env(const std::string& msg) { throw Error(ErrorCode::ConfigError, "bandit environment: " + msg); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

ArmDistribution arm_from_json(const nlohmann::json& j) {
  ArmDistribution a;
  if (j.is_number()) {
    a.mean = j.get<double>();
    return a;
  }
  if (!j.is_object()) bad_env("arm must be a number or an object");
  const std::string type = j.value("type", std::string("bernoulli"));
  if (type == "bernoulli") {
    for (const auto& [k, v] : j.items()) {
      if (k != "type" && k != "p") bad_env("unknown key '" + k + "' in bernoulli arm");
    }
    a.mean = j.at("p").get<double>();
  } else if (type == "gaussian") {
    for (const auto& [k, v] : j.items()) {
      if (k != "type" && k != "mean" && k != "stddev") bad_env("unknown key '" + k + "' in gaussian arm");
    }
    a.kind = ArmDistribution::Kind::Gaussian;
    a.mean = j.at("mean").get<double>();
    a.stddev = j.at("stddev").get<double>();
  } else {
    bad_env("unknown arm type '" + type + "'");
  }
  return a;
}

}  // namespace

double ArmDistribution::sample(Rng& rng) const {
  if (kind == Kind::Bernoulli) return rng.bernoulli(mean) ? 1.0 : 0.0;
  return mean + stddev * rng.normal();
}

BanditEnvironment BanditEnvironment::bernoulli(std::vector<double> means, std::size_t rounds) {
  BanditEnvironment env;
  for (double m : means) env.arms.push_back({ArmDistribution::Kind::Bernoulli, m, 0.0});
  env.rounds = rounds;
  env.final_window = std::min<std::size_t>(1000, rounds);
  env.checkpoint_every = std::max<std::size_t>(1, std::min<std::size_t>(1000, rounds));
  env.validate();
  return env;
}

BanditEnvironment BanditEnvironment::from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad_env("expected an object");
  BanditEnvironment env;
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "arms") {
        if (!v.is_array()) bad_env("'arms' must be an array");
        for (const auto& a : v) env.arms.push_back(arm_from_json(a));
      } else if (k == "rounds") {
        env.rounds = v.get<std::size_t>();
      } else if (k == "final_window") {
        env.final_window = v.get<std::size_t>();
      } else if (k == "checkpoint_every") {
        env.checkpoint_every = v.get<std::size_t>();
      } else {
        bad_env("unknown key '" + k + "'");
      }
    }
    if (!j.contains("final_window")) env.final_window = std::min(env.final_window, env.rounds);
    if (!j.contains("checkpoint_every")) env.checkpoint_every = std::max<std::size_t>(1, std::min(env.checkpoint_every, env.rounds));
  } catch (const nlohmann::json::exception& e) {
    bad_env(e.what());
  }
  env.validate();
  return env;
}

BanditEnvironment BanditEnvironment::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  const auto j = nlohmann::json::parse(in, nullptr, false, true);
  if (j.is_discarded()) bad_env("invalid JSON in " + path.string());
  return from_json(j);
}

void BanditEnvironment::validate() const {
  if (arms.empty()) throw Error(ErrorCode::NoArms, "bandit environment has no arms");
  for (const auto& a : arms) {
    if (!std::isfinite(a.mean) || a.mean < 0.0 || a.mean > 1.0) bad_env("arm mean outside [0, 1]");
    if (!std::isfinite(a.stddev) || a.stddev < 0.0) bad_env("negative stddev");
  }
  if (rounds == 0) bad_env("rounds must be positive");
  if (final_window == 0 || final_window > rounds) bad_env("final_window must lie in [1, rounds]");
  if (checkpoint_every == 0) bad_env("checkpoint_every must be positive");
}

std::size_t BanditEnvironment::best_arm() const {
  std::size_t best = 0;
  for (std::size_t a = 1; a < arms.size(); ++a) {
    if (arms[a].mean > arms[best].mean) best = a;
  }
  return best;
}

double BanditEnvironment::best_mean() const { return arms.at(best_arm()).mean; }

SimulationRun simulate_run(const BanditEnvironment& env, const PolicyConfig& policy, std::uint64_t seed) {
  env.validate();
  auto p = make_policy(policy, env.arms.size());
  Rng reward_rng(derive_seed(seed, "rewards"));
  Rng policy_rng(derive_seed(seed, "policy"));
  const double best = env.best_mean();

  SimulationRun run;
  run.selections.reserve(env.rounds);
  run.rewards.reserve(env.rounds);
  run.cumulative_regret.reserve(env.rounds);
  double regret = 0.0;
  for (std::size_t t = 0; t < env.rounds; ++t) {
    const std::size_t arm = p->select(policy_rng);
    const RewardSignal reward(env.arms[arm].sample(reward_rng));
    p->observe(arm, reward, policy_rng);
    regret += best - env.arms[arm].mean;
    run.selections.push_back(arm);
    run.rewards.push_back(reward.value());
    run.cumulative_regret.push_back(regret);
  }
  return run;
}

SimulationReport simulate_strategies(const BanditEnvironment& env, std::span<const PolicyConfig> policies,
                                     std::span<const std::uint64_t> seeds) {
  env.validate();
  if (seeds.empty()) throw Error(ErrorCode::EmptyInput, "no seeds given");
  std::vector<std::size_t> checkpoints;
  for (std::size_t r = env.checkpoint_every; r <= env.rounds; r += env.checkpoint_every) checkpoints.push_back(r);
  if (checkpoints.empty() || checkpoints.back() != env.rounds) checkpoints.push_back(env.rounds);

  const std::size_t best = env.best_arm();
  const double n_seeds = static_cast<double>(seeds.size());
  SimulationReport report;
  for (const auto& policy : policies) {
    const auto start = std::chrono::steady_clock::now();
    StrategyReport sr;
    sr.strategy = policy.strategy;
    sr.checkpoints = checkpoints;
    sr.regret_curve.assign(checkpoints.size(), 0.0);
    for (std::uint64_t seed : seeds) {
      const SimulationRun run = simulate_run(env, policy, seed);
      double total = 0.0;
      for (double r : run.rewards) total += r;
      sr.mean_reward += total / static_cast<double>(env.rounds) / n_seeds;
      for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        sr.regret_curve[c] += run.cumulative_regret[checkpoints[c] - 1] / n_seeds;
      }
      const auto window_begin = run.selections.end() - static_cast<std::ptrdiff_t>(env.final_window);
      const auto hits = std::count(window_begin, run.selections.end(), best);
      sr.best_arm_frequency += static_cast<double>(hits) / static_cast<double>(env.final_window) / n_seeds;
    }
    sr.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.strategies.push_back(std::move(sr));
  }
  return report;
}

std::string SimulationReport::summary_csv() const {
  std::string out = "strategy,mean_reward,best_arm_frequency,final_regret\n";
  for (const auto& s : strategies) {
    out += std::string(to_string(s.strategy)) + "," + fmt(s.mean_reward) + "," + fmt(s.best_arm_frequency) + "," +
           fmt(s.regret_curve.empty() ? 0.0 : s.regret_curve.back()) + "\n";
  }
  return out;
}

std::string SimulationReport::regret_csv() const {
  std::string out = "strategy,round,cumulative_regret\n";
  for (const auto& s : strategies) {
    for (std::size_t c = 0; c < s.checkpoints.size(); ++c) {
      out += std::string(to_string(s.strategy)) + "," + std::to_string(s.checkpoints[c]) + "," +
             fmt(s.regret_curve[c]) + "\n";
    }
  }
  return out;
}

}  // namespace viewfuse
