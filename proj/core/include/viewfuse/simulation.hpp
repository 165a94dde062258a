#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "viewfuse/bandit.hpp"
#include "viewfuse/random.hpp"

namespace viewfuse {

/// Reward distribution of one simulated arm. Gaussian draws are clamped to
/// [0, 1] by RewardSignal; regret is measured against the declared means.
struct ArmDistribution {
  enum class Kind { Bernoulli, Gaussian };
  Kind kind = Kind::Bernoulli;
  double mean = 0.5;
  double stddev = 0.0;

  [[nodiscard]] double sample(Rng& rng) const;
};

/// JSON form:
///   {"arms": [{"type": "bernoulli", "p": 0.9},
///             {"type": "gaussian", "mean": 0.5, "stddev": 0.1}],
///    "rounds": 10000, "final_window": 1000, "checkpoint_every": 1000}
/// A bare number in "arms" is shorthand for a Bernoulli arm.
struct BanditEnvironment {
  std::vector<ArmDistribution> arms;
  std::size_t rounds = 10000;
  std::size_t final_window = 1000;
  std::size_t checkpoint_every = 1000;

  [[nodiscard]] static BanditEnvironment bernoulli(std::vector<double> means, std::size_t rounds = 10000);
  /// Throws ConfigError.
  [[nodiscard]] static BanditEnvironment from_json(const nlohmann::json& j);
  [[nodiscard]] static BanditEnvironment load(const std::filesystem::path& path);
  void validate() const;
  [[nodiscard]] std::size_t best_arm() const;
  [[nodiscard]] double best_mean() const;
};

/// One seeded run. Reward draws and policy randomness use separate streams,
/// so strategies on the same seed face the same reward sequence per arm.
struct SimulationRun {
  std::vector<std::size_t> selections;
  std::vector<double> rewards;
  /// Pseudo-regret after each round (declared means, not draws).
  std::vector<double> cumulative_regret;
};

[[nodiscard]] SimulationRun simulate_run(const BanditEnvironment& env, const PolicyConfig& policy,
                                         std::uint64_t seed);

struct StrategyReport {
  Strategy strategy = Strategy::Ucb1;
  /// Mean reward per round, averaged over seeds.
  double mean_reward = 0.0;
  /// Rounds (1-based) at which the regret curve is sampled.
  std::vector<std::size_t> checkpoints;
  /// Cumulative pseudo-regret at each checkpoint, averaged over seeds.
  std::vector<double> regret_curve;
  /// Fraction of pulls on the best arm over the final window, averaged.
  double best_arm_frequency = 0.0;
  double wall_seconds = 0.0;
};

struct SimulationReport {
  std::vector<StrategyReport> strategies;

  /// strategy,mean_reward,best_arm_frequency,final_regret. Wall time is left
  /// out so equal seeds give byte-identical CSV.
  [[nodiscard]] std::string summary_csv() const;
  /// strategy,round,cumulative_regret
  [[nodiscard]] std::string regret_csv() const;
};

[[nodiscard]] SimulationReport simulate_strategies(const BanditEnvironment& env,
                                                   std::span<const PolicyConfig> policies,
                                                   std::span<const std::uint64_t> seeds);

}  // namespace viewfuse
