#include "mmab/model.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mmab/errors.hpp"

namespace mmab {

void EnvSpec::validate() const {
  const std::size_t k = means.size();
  if (k == 0) throw std::invalid_argument("EnvSpec: no arms");
  if (capacities.size() != k)
    throw std::invalid_argument("EnvSpec: means and capacities differ in length (" +
                                std::to_string(k) + " vs " +
                                std::to_string(capacities.size()) + ")");
  if (num_players < 1) throw std::invalid_argument("EnvSpec: num_players must be >= 1");
  if (horizon < 1) throw std::invalid_argument("EnvSpec: horizon must be >= 1");
  long long total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(means[i] >= 0.0 && means[i] <= 1.0))
      throw std::invalid_argument("EnvSpec: mean of arm " + std::to_string(i) +
                                  " outside [0,1]");
    if (capacities[i] < 1 || capacities[i] > num_players)
      throw std::invalid_argument("EnvSpec: capacity of arm " + std::to_string(i) +
                                  " outside [1, num_players]");
    total += capacities[i];
  }
  if (total < num_players) throw InfeasibleProblem("EnvSpec: sum of capacities < num_players");
  if (static_cast<std::size_t>(num_players) >= k)
    throw std::invalid_argument("EnvSpec: requires num_players < num_arms");
}

int AssignmentProfile::total() const { return std::accumulate(counts.begin(), counts.end(), 0); }

double expected_reward(const AssignmentProfile& profile, const std::vector<double>& means,
                       const std::vector<int>& capacities) {
  if (profile.counts.size() != means.size() || capacities.size() != means.size())
    throw std::invalid_argument("expected_reward: dimension mismatch");
  double v = 0.0;
  for (std::size_t k = 0; k < means.size(); ++k)
    v += std::min(profile.counts[k], capacities[k]) * means[k];
  return v;
}

double expected_reward(const AssignmentProfile& profile, const EnvSpec& spec) {
  return expected_reward(profile, spec.means, spec.capacities);
}

std::vector<ArmIndex> arms_by_mean_desc(const std::vector<double>& means) {
  std::vector<ArmIndex> order(means.size());
  std::iota(order.begin(), order.end(), ArmIndex{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](ArmIndex a, ArmIndex b) { return means[a] > means[b]; });
  return order;
}

OptimalProfile oracle(const std::vector<double>& means, const std::vector<int>& capacities,
                      int num_players) {
  if (means.size() != capacities.size())
    throw std::invalid_argument("oracle: means and capacities differ in length");
  if (num_players < 1) throw std::invalid_argument("oracle: num_players must be >= 1");
  long long total = 0;
  for (int c : capacities) total += std::max(c, 0);
  if (total < num_players) throw InfeasibleProblem("oracle: sum of capacities < num_players");

  OptimalProfile out;
  out.profile.counts.assign(means.size(), 0);
  int left = num_players;
  for (ArmIndex k : arms_by_mean_desc(means)) {
    if (left == 0) break;
    const int take = std::min(left, std::max(capacities[k], 0));
    if (take == 0) continue;
    out.profile.counts[k] = take;
    out.least_favored = k;
    out.value += take * means[k];
    left -= take;
  }
  return out;
}

double per_slot_regret(const AssignmentProfile& profile, const OptimalProfile& opt,
                       const EnvSpec& spec) {
  const double gap = opt.value - expected_reward(profile, spec);
  return gap < 0.0 && gap > -1e-12 ? 0.0 : gap;
}

}  // namespace mmab
