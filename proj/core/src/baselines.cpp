#include "mmab/baselines.hpp"

#include <memory>
#include <stdexcept>

namespace mmab {

void HeuristicState::record(const Observation& obs) {
  ++pulls[obs.arm];
  reward_sum[obs.arm] += obs.reward;
  if (obs.is_shared()) ++shared_events[obs.arm];
}

ArmIndex warmup_arm(std::size_t player_slot, Slot t, std::size_t num_arms) {
  return static_cast<ArmIndex>((player_slot + static_cast<std::size_t>(t - 1)) % num_arms);
}

ArmIndex highest_reward_choice(const HeuristicState& s) {
  ArmIndex best = 0;
  double best_v = -1.0;
  for (std::size_t k = 0; k < s.pulls.size(); ++k) {
    const double v = s.pulls[k] > 0 ? s.reward_sum[k] / static_cast<double>(s.pulls[k]) : 0.0;
    if (v > best_v) {
      best_v = v;
      best = k;
    }
  }
  return best;
}

ArmIndex idlest_arm_choice(const HeuristicState& s) {
  ArmIndex best = 0;
  double best_v = 2.0;
  for (std::size_t k = 0; k < s.pulls.size(); ++k) {
    if (s.pulls[k] == 0) continue;
    const double v = static_cast<double>(s.shared_events[k]) / static_cast<double>(s.pulls[k]);
    if (v < best_v) {
      best_v = v;
      best = k;
    }
  }
  return best;
}

HighestRewardPolicy::HighestRewardPolicy(const PlayerContext& ctx)
    : seat_(ctx.player_slot), k_(ctx.info.num_arms), state_(ctx.info.num_arms) {}

ArmIndex HighestRewardPolicy::next_action(Slot t) {
  if (t <= static_cast<Slot>(k_)) {
    phase_ = PhaseTag::kExplore;
    return warmup_arm(seat_, t, k_);
  }
  phase_ = PhaseTag::kExploit;
  return highest_reward_choice(state_);
}

void HighestRewardPolicy::observe(const Observation& obs) { state_.record(obs); }

IdlestArmPolicy::IdlestArmPolicy(const PlayerContext& ctx)
    : seat_(ctx.player_slot), k_(ctx.info.num_arms), state_(ctx.info.num_arms) {}

ArmIndex IdlestArmPolicy::next_action(Slot t) {
  if (t <= static_cast<Slot>(k_)) {
    phase_ = PhaseTag::kExplore;
    return warmup_arm(seat_, t, k_);
  }
  phase_ = PhaseTag::kExploit;
  return idlest_arm_choice(state_);
}

void IdlestArmPolicy::observe(const Observation& obs) { state_.record(obs); }

PolicyFactory fixed_profile_factory(const AssignmentProfile& profile) {
  std::vector<ArmIndex> seats;
  for (std::size_t k = 0; k < profile.counts.size(); ++k)
    for (int n = 0; n < profile.counts[k]; ++n) seats.push_back(k);
  return [seats](const PlayerContext& ctx) -> std::unique_ptr<Policy> {
    if (ctx.player_slot >= seats.size())
      throw std::invalid_argument("fixed_profile_factory: more seats than profile players");
    return std::make_unique<FixedArmPolicy>(seats[ctx.player_slot]);
  };
}

PolicyFactory fixed_arm_factory(ArmIndex arm) {
  return [arm](const PlayerContext&) -> std::unique_ptr<Policy> {
    return std::make_unique<FixedArmPolicy>(arm);
  };
}

}  // namespace mmab
