#include "mmab/engine.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "mmab/errors.hpp"

namespace mmab {

Engine::Engine(EnvSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  opt_ = oracle(spec_);
  const std::size_t k = spec_.num_arms();
  arm_rngs_.reserve(k);
  for (std::size_t a = 0; a < k; ++a)
    arm_rngs_.emplace_back(derive_seed(spec_.seed, SeedStream::kArmReward, a));
  profile_.counts.assign(k, 0);
  draws_.assign(k, 0);
}

PublicInfo Engine::public_info() const {
  return PublicInfo{spec_.num_arms(), spec_.horizon, spec_.feedback};
}

std::vector<Observation> Engine::step(std::span<const ArmIndex> actions) {
  const std::size_t k = spec_.num_arms();
  if (actions.size() != static_cast<std::size_t>(spec_.num_players))
    throw std::invalid_argument("Engine::step: expected " + std::to_string(spec_.num_players) +
                                " actions, got " + std::to_string(actions.size()));
  for (std::size_t p = 0; p < actions.size(); ++p)
    if (actions[p] >= k)
      throw InvalidAction("player seat " + std::to_string(p) + " chose arm " +
                          std::to_string(actions[p]) + " (K=" + std::to_string(k) + ")");

  std::fill(profile_.counts.begin(), profile_.counts.end(), 0);
  for (ArmIndex a : actions) ++profile_.counts[a];
  for (std::size_t a = 0; a < k; ++a)
    draws_[a] = uniform_unit(arm_rngs_[a]) < spec_.means[a] ? 1 : 0;
  ++t_;

  std::vector<Observation> obs(actions.size());
  for (std::size_t p = 0; p < actions.size(); ++p) {
    const ArmIndex a = actions[p];
    const int n = profile_.counts[a];
    obs[p].arm = a;
    obs[p].reward = static_cast<double>(std::min(n, spec_.capacities[a]) * draws_[a]);
    if (spec_.feedback == Feedback::kSharingInfo)
      obs[p].feedback = SharingCount{n};
    else
      obs[p].feedback = SharingFlag{n > 1};
  }
  return obs;
}

std::uint64_t player_seed(std::uint64_t master, std::size_t player_slot) {
  return derive_seed(master, SeedStream::kPlayer, player_slot);
}

RunTrace run(const PolicyFactory& factory, const EnvSpec& spec, const RunOptions& options) {
  Engine engine(spec);
  const auto m = static_cast<std::size_t>(spec.num_players);
  const PublicInfo info = engine.public_info();

  std::vector<std::unique_ptr<Policy>> policies;
  policies.reserve(m);
  for (std::size_t p = 0; p < m; ++p)
    policies.push_back(factory(PlayerContext{p, info, player_seed(spec.seed, p)}));

  RunTrace trace;
  const auto horizon = static_cast<std::size_t>(spec.horizon);
  trace.cumulative_regret.reserve(horizon);
  trace.optimal_slot.reserve(horizon);
  trace.phase_mask.reserve(horizon);
  if (options.record_profiles) trace.profiles.reserve(horizon);

  std::vector<ArmIndex> actions(m);
  double cum = 0.0;
  for (Slot t = 1; t <= spec.horizon; ++t) {
    for (std::size_t p = 0; p < m; ++p) actions[p] = policies[p]->next_action(t);
    std::uint8_t mask = 0;
    for (const auto& pol : policies) mask |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(pol->phase()));

    const auto obs = engine.step(actions);
    const double r = per_slot_regret(engine.last_profile(), engine.optimal(), engine.spec());
    cum += r;
    trace.cumulative_regret.push_back(cum);
    trace.optimal_slot.push_back(r < 1e-12 ? 1 : 0);
    trace.phase_mask.push_back(mask);
    if (options.record_profiles) trace.profiles.push_back(engine.last_profile());

    for (std::size_t p = 0; p < m; ++p) policies[p]->observe(obs[p]);
    if (options.on_slot)
      options.on_slot(SlotView{t, actions, engine.last_profile(), policies, obs});
  }
  return trace;
}

}  // namespace mmab
