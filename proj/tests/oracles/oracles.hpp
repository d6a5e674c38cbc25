#pragma once

// Brute-force references for the tests. Deliberately independent of the
// library: nothing here includes a mmab header.

#include <cstdint>
#include <vector>

namespace oracles {

struct BruteForceResult {
  std::vector<int> profile;
  double value = 0.0;
  long long enumerated = 0;
};

/// Exhaustive search over every way to put M players on K arms.
/// Throws std::length_error when K > 6 or M > 8.
BruteForceResult brute_force_optimal(const std::vector<double>& means,
                                     const std::vector<int>& capacities, int m);

/// Number of weak compositions of m into k parts: C(m+k-1, k-1).
long long weak_compositions(int m, int k);

/// Largest q on the grid mu, mu+res, mu+2res, ... (q <= 1) with
/// tau*kl(mu, q) <= ln t' + 4 ln ln t', t' = max(t, 3).
double klucb_grid(double mu, long long tau, long long t, double resolution);

double kl_bernoulli(double p, double q);

// RankAssign for external ranks in 1..K-1 over 2K-2 slots. arms[i][s-1] is
// the 1-based arm of the i-th player at step s.
struct RankAssignTranscript {
  std::vector<std::vector<int>> arms;
  std::vector<std::vector<bool>> shared;
  std::vector<int> ranks;  // 1 + flags seen in the first 2k slots
  std::vector<int> players_seen;  // 1 + all flags
};
RankAssignTranscript simulate_rank_assign(int num_arms, const std::vector<int>& external_ranks);

// DPE communication steps 2..6 seen through counts: one entry per slot in
// which the arm the followers sit on carries all M players.
struct DpeCommState {
  std::vector<int> optimal_set;  // 0-based arms
  int least_favored = 0;
  std::vector<int> lower;
  std::vector<int> upper;
};
struct CommEvent {
  int step;
  int arm;
};
std::vector<CommEvent> simulate_dpe_comm(const DpeCommState& pre, const DpeCommState& next,
                                         int num_players, int num_arms);

// CommBack cell: sender writes `value` MSB first over `width` slots, sitting
// on the leader's arm for a 1. Returns the leader's per-slot sharing flags.
std::vector<bool> simulate_commback_cell(long long value, int width);

}  // namespace oracles
