#pragma once

#include <cstdint>
#include <vector>

namespace mmab {

/// Individual (IE) and united (UE) exploration tallies for one arm.
struct ArmStats {
  double ie_sum = 0.0;        // S^IE, per-load rewards
  std::int64_t ie_count = 0;  // τ
  double ue_sum = 0.0;        // S^UE, full-arm rewards
  std::int64_t ue_count = 0;  // ι

  double mu_hat() const { return ie_count > 0 ? ie_sum / static_cast<double>(ie_count) : 0.0; }
  double nu_hat() const { return ue_count > 0 ? ue_sum / static_cast<double>(ue_count) : 0.0; }
};

using PlayerStats = std::vector<ArmStats>;

struct CapacityInterval {
  int lower = 1;  // m^l
  int upper = 1;  // m^u

  bool learned() const { return lower == upper; }
  bool operator==(const CapacityInterval&) const = default;
};

using CapacityBounds = std::vector<CapacityInterval>;

inline CapacityBounds fresh_bounds(std::size_t num_arms, int num_players) {
  return CapacityBounds(num_arms, CapacityInterval{1, num_players});
}

/// Bernoulli KL divergence kl(p, q), natural log, 0·ln 0 = 0.
double bern_kl(double p, double q);

/// ln(max(t,3)) + 4·ln ln(max(t,3)).
double exploration_budget(std::int64_t t);

/// sup{q in [mu_hat, 1): pulls·kl(mu_hat, q) <= f(t)} by bisection.
double klucb_index(double mu_hat, std::int64_t pulls, std::int64_t t);

/// sqrt((1 + 1/x)·ln(2·sqrt(x+1)/δ) / (2x)).
double phi(std::int64_t x, double delta);

struct BoundUpdate {
  CapacityInterval bounds;
  bool crossed = false;  // raw candidates crossed and were repaired
};

/// One confidence-bound refresh for a single arm. Needs τ >= 1 and ι >= 1,
/// otherwise the bounds are returned unchanged.
BoundUpdate update_capacity_bounds(const ArmStats& stats, CapacityInterval bounds, double delta,
                                   int num_players);

/// g(k, j): arm k beats arm j with confidence radius 3·sqrt(ln T / (2τ)).
/// False when either count is zero.
bool separation_indicator_g(double mu_k, std::int64_t tau_k, double mu_j, std::int64_t tau_j,
                            std::int64_t horizon);

}  // namespace mmab
