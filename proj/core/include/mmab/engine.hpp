#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mmab/model.hpp"
#include "mmab/rng.hpp"
#include "mmab/types.hpp"

namespace mmab {

struct SharingCount {
  int players = 1;
};
struct SharingFlag {
  bool shared = false;
};

/// What one player learns after one slot: its own arm, the arm's total
/// reward, and the sharing feedback for that arm. Nothing else.
struct Observation {
  ArmIndex arm = 0;
  double reward = 0.0;
  std::variant<SharingCount, SharingFlag> feedback;

  bool is_shared() const {
    if (const auto* c = std::get_if<SharingCount>(&feedback)) return c->players > 1;
    return std::get<SharingFlag>(feedback).shared;
  }
  std::optional<int> sharing_count() const {
    if (const auto* c = std::get_if<SharingCount>(&feedback)) return c->players;
    return std::nullopt;
  }
};

/// The public part of the problem a player may know up front.
struct PublicInfo {
  std::size_t num_arms = 0;
  std::int64_t horizon = 0;
  Feedback feedback = Feedback::kSharingInfo;
};

/// Everything a policy constructor receives.
struct PlayerContext {
  std::size_t player_slot = 0;  // engine-side seat; not a rank
  PublicInfo info;
  std::uint64_t rng_seed = 0;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual ArmIndex next_action(Slot t) = 0;
  virtual void observe(const Observation& obs) = 0;
  virtual PhaseTag phase() const { return PhaseTag::kExploit; }
};

using PolicyFactory = std::function<std::unique_ptr<Policy>(const PlayerContext&)>;

/// Lockstep environment. One Bernoulli draw per arm per slot, each arm on
/// its own stream so draws do not depend on what players do.
class Engine {
 public:
  explicit Engine(EnvSpec spec);

  const EnvSpec& spec() const { return spec_; }
  const OptimalProfile& optimal() const { return opt_; }

  /// Plays one slot. Throws InvalidAction for out-of-range arms and
  /// std::invalid_argument when actions.size() != M.
  std::vector<Observation> step(std::span<const ArmIndex> actions);

  const AssignmentProfile& last_profile() const { return profile_; }
  const std::vector<std::uint8_t>& last_draws() const { return draws_; }
  Slot slots_played() const { return t_; }
  PublicInfo public_info() const;

 private:
  EnvSpec spec_;
  OptimalProfile opt_;
  std::vector<Rng> arm_rngs_;
  AssignmentProfile profile_;
  std::vector<std::uint8_t> draws_;
  Slot t_ = 0;
};

struct SlotView {
  Slot t;
  std::span<const ArmIndex> actions;
  const AssignmentProfile& profile;
  std::span<const std::unique_ptr<Policy>> policies;
  std::span<const Observation> observations;
};

struct RunOptions {
  bool record_profiles = false;
  std::function<void(const SlotView&)> on_slot;
};

struct RunTrace {
  std::vector<double> cumulative_regret;      // index t-1 holds regret through slot t
  std::vector<std::uint8_t> optimal_slot;     // 1 if the slot's profile had zero regret
  std::vector<std::uint8_t> phase_mask;       // OR of (1 << PhaseTag) over players
  std::vector<AssignmentProfile> profiles;    // only with record_profiles

  double final_regret() const { return cumulative_regret.empty() ? 0.0 : cumulative_regret.back(); }
  double regret_at(Slot t) const { return t <= 0 ? 0.0 : cumulative_regret.at(t - 1); }
};

/// Seed handed to the policy in seat `player_slot`.
std::uint64_t player_seed(std::uint64_t master, std::size_t player_slot);

RunTrace run(const PolicyFactory& factory, const EnvSpec& spec, const RunOptions& options = {});

}  // namespace mmab
