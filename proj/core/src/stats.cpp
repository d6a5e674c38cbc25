#include "mmab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmab {

double bern_kl(double p, double q) {
  double v = 0.0;
  if (p > 0.0) v += p * std::log(p / q);
  if (p < 1.0) v += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return std::max(v, 0.0);
}

double exploration_budget(std::int64_t t) {
  const double x = static_cast<double>(std::max<std::int64_t>(t, 3));
  return std::log(x) + 4.0 * std::log(std::log(x));
}

double klucb_index(double mu_hat, std::int64_t pulls, std::int64_t t) {
  constexpr double kTop = 1.0 - 1e-12;
  mu_hat = std::clamp(mu_hat, 0.0, 1.0);
  if (mu_hat >= kTop) return 1.0;
  const double budget = exploration_budget(t) / static_cast<double>(std::max<std::int64_t>(pulls, 1));
  if (bern_kl(mu_hat, kTop) <= budget) return kTop;
  double lo = mu_hat;
  double hi = kTop;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (bern_kl(mu_hat, mid) <= budget)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double phi(std::int64_t x, double delta) {
  const double xd = static_cast<double>(x);
  return std::sqrt((1.0 + 1.0 / xd) * std::log(2.0 * std::sqrt(xd + 1.0) / delta) / (2.0 * xd));
}

BoundUpdate update_capacity_bounds(const ArmStats& stats, CapacityInterval bounds, double delta,
                                   int num_players) {
  BoundUpdate out{bounds, false};
  if (stats.ie_count < 1 || stats.ue_count < 1) return out;
  const double mu = stats.mu_hat();
  const double nu = stats.nu_hat();
  const double slack = phi(stats.ie_count, delta) + phi(stats.ue_count, delta);

  // Work in doubles first: ν̂/(μ̂−s) can be huge when the denominator is tiny.
  double cand_lo = std::ceil(nu / (mu + slack));
  double cand_hi = std::numeric_limits<double>::infinity();
  if (mu - slack > 0.0) cand_hi = std::floor(nu / (mu - slack));

  const double cap = static_cast<double>(num_players);
  cand_lo = std::clamp(cand_lo, 1.0, cap);
  cand_hi = std::clamp(cand_hi, 1.0, cap);

  int lo = std::max(bounds.lower, static_cast<int>(cand_lo));
  int hi = std::min(bounds.upper, static_cast<int>(cand_hi));
  if (lo > hi) {
    // Keep both bounds monotone: the new lower bound may not pass the old
    // upper one and the upper bound never drops below the lower one.
    out.crossed = true;
    lo = std::min(lo, bounds.upper);
    hi = std::max(hi, lo);
  }
  out.bounds = CapacityInterval{lo, hi};
  return out;
}

bool separation_indicator_g(double mu_k, std::int64_t tau_k, double mu_j, std::int64_t tau_j,
                            std::int64_t horizon) {
  if (tau_k < 1 || tau_j < 1) return false;
  const double ln_t = std::log(static_cast<double>(std::max<std::int64_t>(horizon, 2)));
  const double rk = 3.0 * std::sqrt(ln_t / (2.0 * static_cast<double>(tau_k)));
  const double rj = 3.0 * std::sqrt(ln_t / (2.0 * static_cast<double>(tau_j)));
  return mu_k - rk >= mu_j + rj;
}

}  // namespace mmab
