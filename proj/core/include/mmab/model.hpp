#pragma once

#include <cstdint>
#include <vector>

#include "mmab/types.hpp"

namespace mmab {

/// Ground truth for one problem instance.
struct EnvSpec {
  std::vector<double> means;     // μ_k in [0, 1]
  std::vector<int> capacities;   // m_k in [1, M]
  int num_players = 1;           // M
  std::int64_t horizon = 1;      // T
  Feedback feedback = Feedback::kSharingInfo;
  std::uint64_t seed = 0;

  std::size_t num_arms() const { return means.size(); }

  // Throws std::invalid_argument on malformed fields and InfeasibleProblem
  // when the capacities cannot host every player.
  void validate() const;
};

/// Per-arm player counts a_k.
struct AssignmentProfile {
  std::vector<int> counts;

  int total() const;
  bool operator==(const AssignmentProfile&) const = default;
};

struct OptimalProfile {
  AssignmentProfile profile;
  ArmIndex least_favored = 0;  // original arm index of the last filled arm
  double value = 0.0;          // f(a*)
};

/// Σ_k min(a_k, m_k)·μ_k.
double expected_reward(const AssignmentProfile& profile, const EnvSpec& spec);
double expected_reward(const AssignmentProfile& profile, const std::vector<double>& means,
                       const std::vector<int>& capacities);

/// Greedy fill by descending mean (ties: lower index first).
OptimalProfile oracle(const std::vector<double>& means, const std::vector<int>& capacities,
                      int num_players);
inline OptimalProfile oracle(const EnvSpec& spec) {
  return oracle(spec.means, spec.capacities, spec.num_players);
}

/// f(a*) − f(a). Negative values within 1e-12 are clamped to 0.
double per_slot_regret(const AssignmentProfile& profile, const OptimalProfile& opt,
                       const EnvSpec& spec);

/// Arm indices sorted by mean descending, ties by index.
std::vector<ArmIndex> arms_by_mean_desc(const std::vector<double>& means);

}  // namespace mmab
