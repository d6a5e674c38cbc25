#pragma once

#include <cstdint>
#include <vector>

#include "mmab/engine.hpp"

namespace mmab {

/// Own-observation tallies kept by the heuristics.
struct HeuristicState {
  std::vector<std::int64_t> pulls;
  std::vector<double> reward_sum;
  std::vector<std::int64_t> shared_events;

  explicit HeuristicState(std::size_t num_arms)
      : pulls(num_arms, 0), reward_sum(num_arms, 0.0), shared_events(num_arms, 0) {}
  void record(const Observation& obs);
};

/// Warm-up arm for seat `player_slot` at slot t (t in 1..K): a
/// round-robin offset by the seat.
ArmIndex warmup_arm(std::size_t player_slot, Slot t, std::size_t num_arms);

/// Argmax of own empirical mean reward; unpulled arms count as 0, ties to
/// the lower index.
ArmIndex highest_reward_choice(const HeuristicState& s);

/// Argmin of shared_events / pulls over pulled arms; ties to the lower
/// index. Falls back to arm 0 when nothing has been pulled.
ArmIndex idlest_arm_choice(const HeuristicState& s);

class HighestRewardPolicy final : public Policy {
 public:
  explicit HighestRewardPolicy(const PlayerContext& ctx);
  ArmIndex next_action(Slot t) override;
  void observe(const Observation& obs) override;
  PhaseTag phase() const override { return phase_; }
  const HeuristicState& state() const { return state_; }

 private:
  std::size_t seat_;
  std::size_t k_;
  HeuristicState state_;
  PhaseTag phase_ = PhaseTag::kExplore;
};

class IdlestArmPolicy final : public Policy {
 public:
  explicit IdlestArmPolicy(const PlayerContext& ctx);
  ArmIndex next_action(Slot t) override;
  void observe(const Observation& obs) override;
  PhaseTag phase() const override { return phase_; }
  const HeuristicState& state() const { return state_; }

 private:
  std::size_t seat_;
  std::size_t k_;
  HeuristicState state_;
  PhaseTag phase_ = PhaseTag::kExplore;
};

// Test dummies. They take their arm(s) directly and are not meant for
// experiments.

class FixedArmPolicy final : public Policy {
 public:
  explicit FixedArmPolicy(ArmIndex arm) : arm_(arm) {}
  ArmIndex next_action(Slot) override { return arm_; }
  void observe(const Observation&) override {}

 private:
  ArmIndex arm_;
};

/// Factory whose seats play a fixed assignment: seat p gets the p-th arm of
/// the profile expanded in arm order.
PolicyFactory fixed_profile_factory(const AssignmentProfile& profile);

/// Factory whose seats all play one arm.
PolicyFactory fixed_arm_factory(ArmIndex arm);

}  // namespace mmab
