#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "viewfuse/random.hpp"
#include "viewfuse/scoring.hpp"

namespace viewfuse {

/// Reward in [0, 1]. Out-of-range finite inputs are clamped; NaN is rejected.
class RewardSignal {
 public:
  explicit RewardSignal(double value);
  [[nodiscard]] double value() const noexcept { return value_; }

 private:
  double value_;
};

enum class UpdateRule {
  /// r <- ((n - 1) r + x) / n
  ExactMean,
  /// r <- r + lr (x - r) after the first observation
  ExponentialMovingAverage,
};

/// Per-arm statistics for one selection problem. Single writer.
struct BanditState {
  std::vector<std::uint64_t> pulls;
  std::vector<double> means;
  std::uint64_t total_rounds = 0;
  double exploration_weight = 0.5;
  UpdateRule rule = UpdateRule::ExactMean;
  double learning_rate = 0.1;

  [[nodiscard]] static BanditState with_arms(std::size_t arms, double exploration_weight = 0.5);
  [[nodiscard]] std::size_t arm_count() const noexcept { return pulls.size(); }
};

/// argmax_a mean_a + c * sqrt(2 ln t / n_a). Unpulled arms win first,
/// lowest index first; ties go to the lowest index; t is floored at 1.
/// Throws NoArms.
[[nodiscard]] std::size_t ucb1_select(const BanditState& state);

/// Mean plus exploration bonus; +inf for an unpulled arm. Throws InvalidArm.
[[nodiscard]] double ucb1_index(const BanditState& state, std::size_t arm);

/// argmax of empirical means, lowest index on ties. Throws NoArms.
[[nodiscard]] std::size_t greedy_select(const BanditState& state);

/// Increments n_a and t, then folds the reward into the arm's mean.
/// Throws InvalidArm.
[[nodiscard]] BanditState update_mean(BanditState state, std::size_t arm, RewardSignal reward);

/// Uniform arm with probability epsilon, otherwise greedy. Throws NoArms.
[[nodiscard]] std::size_t epsilon_greedy_select(const BanditState& state, double epsilon, Rng& rng);

struct BetaPosterior {
  double alpha = 1.0;
  double beta = 1.0;
};

/// One Beta draw per arm; returns the argmax (lowest index on ties).
/// Throws NoArms.
[[nodiscard]] std::size_t thompson_select(std::span<const BetaPosterior> posteriors, Rng& rng);

/// Composite score of the candidate at the given blend ratio.
[[nodiscard]] RewardSignal compute_reward(const ScoredCandidate& candidate, double blend_ratio);

// ── Strategies ──────────────────────────────────────────────────────────────

enum class Strategy { Ucb1, EpsilonGreedy, Thompson };

[[nodiscard]] std::string_view to_string(Strategy s) noexcept;
/// Accepts "ucb1", "epsilon_greedy", "thompson". Throws UnknownStrategy.
[[nodiscard]] Strategy parse_strategy(std::string_view name);

struct PolicyConfig {
  Strategy strategy = Strategy::Ucb1;
  double exploration_weight = 0.5;
  double epsilon = 0.1;
  /// Beta prior shared by every arm under Thompson sampling.
  double prior_alpha = 0.1;
  double prior_beta = 0.1;
  UpdateRule rule = UpdateRule::ExactMean;
  double learning_rate = 0.1;
};

/// Stateful selection strategy over a fixed arm set.
class SelectionPolicy {
 public:
  virtual ~SelectionPolicy() = default;

  virtual std::size_t select(Rng& rng) = 0;
  virtual void observe(std::size_t arm, RewardSignal reward, Rng& rng);

  [[nodiscard]] const BanditState& state() const noexcept { return state_; }

 protected:
  explicit SelectionPolicy(BanditState state) : state_(std::move(state)) {}
  BanditState state_;
};

[[nodiscard]] std::unique_ptr<SelectionPolicy> make_policy(const PolicyConfig& cfg, std::size_t arms);

}  // namespace viewfuse
