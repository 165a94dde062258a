#include "viewfuse/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace viewfuse {

RewardSignal::RewardSignal(double value) : value_(0.0) {
  if (std::isnan(value)) throw Error(ErrorCode::OutOfRangeArgument, "reward is NaN");
  value_ = std::clamp(value, 0.0, 1.0);
}

BanditState BanditState::with_arms(std::size_t arms, double exploration_weight) {
  BanditState s;
  s.pulls.assign(arms, 0);
  s.means.assign(arms, 0.0);
  s.exploration_weight = exploration_weight;
  return s;
}

namespace {

void require_arms(const BanditState& state) {
  if (state.arm_count() == 0) throw Error(ErrorCode::NoArms, "bandit has no arms");
}

}  // namespace

double ucb1_index(const BanditState& state, std::size_t arm) {
  if (arm >= state.arm_count()) throw Error(ErrorCode::InvalidArm, "arm " + std::to_string(arm));
  const std::uint64_t n = state.pulls[arm];
  if (n == 0) return std::numeric_limits<double>::infinity();
  const double t = static_cast<double>(std::max<std::uint64_t>(state.total_rounds, 1));
  return state.means[arm] +
         state.exploration_weight * std::sqrt(2.0 * std::log(t) / static_cast<double>(n));
}

std::size_t ucb1_select(const BanditState& state) {
  require_arms(state);
  for (std::size_t a = 0; a < state.arm_count(); ++a) {
    if (state.pulls[a] == 0) return a;
  }
  std::size_t best = 0;
  double best_value = ucb1_index(state, 0);
  for (std::size_t a = 1; a < state.arm_count(); ++a) {
    const double v = ucb1_index(state, a);
    if (v > best_value) {
      best = a;
      best_value = v;
    }
  }
  return best;
}

std::size_t greedy_select(const BanditState& state) {
  require_arms(state);
  std::size_t best = 0;
  for (std::size_t a = 1; a < state.arm_count(); ++a) {
    if (state.means[a] > state.means[best]) best = a;
  }
  return best;
}

BanditState update_mean(BanditState state, std::size_t arm, RewardSignal reward) {
  if (arm >= state.arm_count()) throw Error(ErrorCode::InvalidArm, "arm " + std::to_string(arm));
  const std::uint64_t n = ++state.pulls[arm];
  double& mean = state.means[arm];
  const double r = reward.value();
  if (state.rule == UpdateRule::ExponentialMovingAverage && n > 1) {
    mean += state.learning_rate * (r - mean);
  } else {
    mean = (static_cast<double>(n - 1) * mean + r) / static_cast<double>(n);
  }
  ++state.total_rounds;
  return state;
}

std::size_t epsilon_greedy_select(const BanditState& state, double epsilon, Rng& rng) {
  require_arms(state);
  if (epsilon > 0.0 && rng.uniform() < epsilon) return rng.index(state.arm_count());
  return greedy_select(state);
}

std::size_t thompson_select(std::span<const BetaPosterior> posteriors, Rng& rng) {
  if (posteriors.empty()) throw Error(ErrorCode::NoArms, "bandit has no arms");
  std::size_t best = 0;
  double best_draw = -1.0;
  for (std::size_t a = 0; a < posteriors.size(); ++a) {
    const double draw = rng.beta(posteriors[a].alpha, posteriors[a].beta);
    if (draw > best_draw) {
      best = a;
      best_draw = draw;
    }
  }
  return best;
}

RewardSignal compute_reward(const ScoredCandidate& candidate, double blend_ratio) {
  return RewardSignal(
      composite_score(candidate.normalized_confidence, candidate.relevance_weight, blend_ratio));
}

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::Ucb1: return "ucb1";
    case Strategy::EpsilonGreedy: return "epsilon_greedy";
    case Strategy::Thompson: return "thompson";
  }
  return "ucb1";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "ucb1") return Strategy::Ucb1;
  if (name == "epsilon_greedy") return Strategy::EpsilonGreedy;
  if (name == "thompson") return Strategy::Thompson;
  throw Error(ErrorCode::UnknownStrategy, std::string(name));
}

void SelectionPolicy::observe(std::size_t arm, RewardSignal reward, Rng& /*rng*/) {
  state_ = update_mean(std::move(state_), arm, reward);
}

namespace {

class Ucb1Policy final : public SelectionPolicy {
 public:
  explicit Ucb1Policy(BanditState s) : SelectionPolicy(std::move(s)) {}
  std::size_t select(Rng& /*rng*/) override { return ucb1_select(state_); }
};

class EpsilonGreedyPolicy final : public SelectionPolicy {
 public:
  EpsilonGreedyPolicy(BanditState s, double epsilon)
      : SelectionPolicy(std::move(s)), epsilon_(epsilon) {}
  std::size_t select(Rng& rng) override { return epsilon_greedy_select(state_, epsilon_, rng); }

 private:
  double epsilon_;
};

class ThompsonPolicy final : public SelectionPolicy {
 public:
  ThompsonPolicy(BanditState s, double prior_alpha, double prior_beta)
      : SelectionPolicy(std::move(s)),
        posteriors_(state_.arm_count(), BetaPosterior{prior_alpha, prior_beta}) {}

  std::size_t select(Rng& rng) override { return thompson_select(posteriors_, rng); }

  void observe(std::size_t arm, RewardSignal reward, Rng& rng) override {
    SelectionPolicy::observe(arm, reward, rng);
    // fractional rewards enter the Beta posterior as Bernoulli outcomes
    if (rng.bernoulli(reward.value())) {
      posteriors_[arm].alpha += 1.0;
    } else {
      posteriors_[arm].beta += 1.0;
    }
  }

 private:
  std::vector<BetaPosterior> posteriors_;
};

}  // namespace

std::unique_ptr<SelectionPolicy> make_policy(const PolicyConfig& cfg, std::size_t arms) {
  if (arms == 0) throw Error(ErrorCode::NoArms, "bandit has no arms");
  BanditState s = BanditState::with_arms(arms, cfg.exploration_weight);
  s.rule = cfg.rule;
  s.learning_rate = cfg.learning_rate;
  switch (cfg.strategy) {
    case Strategy::Ucb1: return std::make_unique<Ucb1Policy>(std::move(s));
    case Strategy::EpsilonGreedy: return std::make_unique<EpsilonGreedyPolicy>(std::move(s), cfg.epsilon);
    case Strategy::Thompson:
      return std::make_unique<ThompsonPolicy>(std::move(s), cfg.prior_alpha, cfg.prior_beta);
  }
  throw Error(ErrorCode::UnknownStrategy, "unhandled strategy");
}

}  // namespace viewfuse
