#pragma once

#include <algorithm>
#include <random>

#include "mmab/dpe_sdi.hpp"

// Random valid shared states and monotone successors for protocol tests.
namespace dpe_test {

inline mmab::DpeSharedInfo random_successor(const mmab::DpeSharedInfo& pre, int M,
                                            std::mt19937_64& rng) {
  using namespace mmab;
  const std::size_t K = pre.bounds.size();
  DpeSharedInfo next;
  next.bounds = pre.bounds;
  for (auto& b : next.bounds) {
    if (rng() % 3 == 0) b.lower = std::min(b.upper, b.lower + 1 + static_cast<int>(rng() % 2));
    if (rng() % 3 == 0) b.upper = std::max(b.lower, b.upper - 1 - static_cast<int>(rng() % 2));
  }
  std::vector<ArmIndex> order(K);
  for (std::size_t a = 0; a < K; ++a) order[a] = a;
  std::shuffle(order.begin(), order.end(), rng);
  next.least_favored = order[0];
  next.optimal_set = {order[0]};
  int used = 0;
  for (std::size_t i = 1; i < K; ++i) {
    if (rng() % 3 == 0) break;
    const ArmIndex a = order[i];
    if (used + next.bounds[a].lower > M - 1) continue;
    used += next.bounds[a].lower;
    next.optimal_set.push_back(a);
  }
  std::sort(next.optimal_set.begin(), next.optimal_set.end());
  return next;
}

}  // namespace dpe_test
