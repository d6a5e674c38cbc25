#include "mmab/sic_sda.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

#include "mmab/errors.hpp"

namespace mmab {

namespace {

bool contains(const std::vector<ArmIndex>& v, ArmIndex k) {
  return std::binary_search(v.begin(), v.end(), k);
}

int ceil_log2(int x) { return x <= 1 ? 0 : static_cast<int>(std::bit_width(static_cast<unsigned>(x - 1))); }

}  // namespace

ArmIndex rank_assign_arm(int external_rank, int step, std::size_t num_arms) {
  const int k = external_rank;
  const int kk = static_cast<int>(num_arms);
  if (step <= 2 * k || step >= kk + k) return static_cast<ArmIndex>(k - 1);
  return static_cast<ArmIndex>(step - k - 1);
}

std::vector<int> sic_allocation(const std::vector<ArmIndex>& active, int active_players,
                                const CapacityBounds& bounds) {
  std::vector<int> b(active.size(), 1);
  int d = active_players - static_cast<int>(active.size());
  for (std::size_t n = 0; n < active.size() && d > 0; ++n) {
    const int room = bounds[active[n]].lower - 1;
    const int give = std::min(room, d);
    if (give > 0) {
      b[n] += give;
      d -= give;
    }
  }
  if (d > 0)
    throw ProtocolError("sic_allocation: " + std::to_string(d) +
                        " players do not fit under the lower capacity bounds");
  return b;
}

ArmIndex sic_ie_arm(int rank, std::int64_t s, const SicPlayerInfo& info,
                    const CapacityBounds& bounds) {
  const auto kt = static_cast<std::int64_t>(info.active_arms.size());
  if (kt == 0) throw ProtocolError("sic_ie_arm: no active arms");
  if (rank <= kt) return info.active_arms[static_cast<std::size_t>((rank + s) % kt)];
  const std::int64_t need = rank - kt;
  std::int64_t prefix = 0;
  for (ArmIndex a : info.active_arms) {
    prefix += bounds[a].lower - 1;
    if (prefix >= need) return a;
  }
  throw ProtocolError("sic_ie_arm: rank " + std::to_string(rank) +
                      " exceeds the spare lower-bound capacity");
}

std::vector<ArmIndex> sic_united_arms(const SicPlayerInfo& info, const CapacityBounds& bounds) {
  std::vector<ArmIndex> out;
  for (ArmIndex a : info.active_arms)
    if (!bounds[a].learned()) out.push_back(a);
  return out;
}

int commback_width(int phase, int num_players) { return phase + 1 + ceil_log2(num_players); }

int commforth_bound_bits(int num_players) { return std::max(1, ceil_log2(num_players)); }

SicAccRejResult sic_acc_rej(const PlayerStats& stats, const SicPlayerInfo& psi,
                            const CapacityBounds& bounds, double delta, std::int64_t horizon,
                            int num_players) {
  SicAccRejResult out;
  out.info.bounds = bounds;
  for (ArmIndex a : psi.active_arms) {
    const auto up = update_capacity_bounds(stats[a], bounds[a], delta, num_players);
    out.info.bounds[a] = up.bounds;
    out.bound_crossings += up.crossed ? 1 : 0;
  }
  const auto& nb = out.info.bounds;
  const auto& act = psi.active_arms;
  const int mt = psi.active_players;
  auto g = [&](ArmIndex k, ArmIndex j) {
    return separation_indicator_g(stats[k].mu_hat(), stats[k].ie_count, stats[j].mu_hat(),
                                  stats[j].ie_count, horizon);
  };
  for (ArmIndex k : act) {
    int not_beaten_upper = 0;
    int beating_lower = 0;
    int wins = 0;
    for (ArmIndex j : act) {
      if (!g(k, j)) not_beaten_upper += nb[j].upper;
      if (g(j, k)) beating_lower += nb[j].lower;
      if (j != k && g(k, j)) ++wins;
    }
    if (nb[k].learned() && not_beaten_upper <= mt) out.info.accept.push_back(k);
    if (beating_lower >= mt) out.info.reject.push_back(k);
    if (!out.info.least_favored && wins == static_cast<int>(act.size()) - 1 && nb[k].lower >= mt)
      out.info.least_favored = k;
  }
  auto drop = [](std::vector<ArmIndex>& v, ArmIndex k) {
    v.erase(std::remove(v.begin(), v.end(), k), v.end());
  };
  if (out.info.least_favored) {
    drop(out.info.accept, *out.info.least_favored);
    drop(out.info.reject, *out.info.least_favored);
  }
  for (ArmIndex k : out.info.reject) drop(out.info.accept, k);
  return out;
}

SicPlayerInfo sic_update(int rank, const SicLeaderInfo& phi, const SicPlayerInfo& psi) {
  SicPlayerInfo out;
  out.phase = psi.phase + 1;
  int accepted_cap = 0;
  for (ArmIndex a : phi.accept) accepted_cap += phi.bounds[a].lower;
  out.active_players = psi.active_players - accepted_cap;
  for (ArmIndex a : psi.active_arms) {
    if (contains(phi.accept, a) || contains(phi.reject, a)) continue;
    if (phi.least_favored && *phi.least_favored == a) continue;
    out.active_arms.push_back(a);
  }
  const int mt = out.active_players;

  auto accepted_for = [&](int r) -> ArmIndex {
    const int need = r - mt;
    int prefix = 0;
    for (ArmIndex a : phi.accept) {
      prefix += phi.bounds[a].lower;
      if (prefix >= need) return a;
    }
    throw ProtocolError("sic_update: rank " + std::to_string(r) + " finds no accepted arm");
  };

  if (phi.least_favored) {
    out.exploit_arm = (rank > mt && !phi.accept.empty()) ? accepted_for(rank) : *phi.least_favored;
  } else if (rank > mt) {
    out.exploit_arm = accepted_for(rank);
  } else if (out.active_arms.empty()) {
    throw ProtocolError("sic_update: active players left without active arms");
  } else if (out.active_arms.size() == 1) {
    out.exploit_arm = out.active_arms.front();
  } else {
    out.allocation = sic_allocation(out.active_arms, mt, phi.bounds);
  }
  return out;
}

int sic_forth_value(int step, ArmIndex arm, const SicLeaderInfo& next, const CapacityBounds& pre) {
  switch (step) {
    case 1: return contains(next.reject, arm) ? 1 : 0;
    case 2: return contains(next.accept, arm) ? 1 : 0;
    case 3: return next.least_favored && *next.least_favored == arm ? 1 : 0;
    case 4: return next.bounds[arm].lower - pre[arm].lower;
    case 5: return pre[arm].upper - next.bounds[arm].upper;
    default: throw std::invalid_argument("sic_forth_value: step must be 1..5");
  }
}

SicLeaderInfo sic_forth_decode(const std::vector<std::vector<int>>& values,
                               const SicPlayerInfo& psi, const CapacityBounds& pre,
                               int num_players) {
  SicLeaderInfo phi;
  phi.bounds = pre;
  for (std::size_t n = 0; n < psi.active_arms.size(); ++n) {
    const ArmIndex a = psi.active_arms[n];
    if (values[0][n]) phi.reject.push_back(a);
    if (values[1][n]) phi.accept.push_back(a);
    if (values[2][n]) {
      if (phi.least_favored) throw ProtocolError("comm: two least-favored arms signalled");
      phi.least_favored = a;
    }
    if (values[0][n] && values[1][n]) throw ProtocolError("comm: arm both accepted and rejected");
    auto& b = phi.bounds[a];
    b.lower += values[3][n];
    b.upper -= values[4][n];
    if (b.lower < 1 || b.upper > num_players || b.lower > b.upper)
      throw ProtocolError("comm: received invalid capacity bounds for arm " + std::to_string(a));
  }
  if (phi.least_favored &&
      (contains(phi.accept, *phi.least_favored) || contains(phi.reject, *phi.least_favored)))
    throw ProtocolError("comm: least-favored arm also accepted or rejected");
  return phi;
}

SicSdaPolicy::SicSdaPolicy(const PlayerContext& ctx, SicOptions opts)
    : k_(ctx.info.num_arms),
      horizon_(ctx.info.horizon),
      delta_(opts.delta > 0.0 ? opts.delta : 2.0 / static_cast<double>(std::max<std::int64_t>(ctx.info.horizon, 3))),
      ortho_seed_(splitmix64(ctx.rng_seed ^ 0x7369636f7274ULL)) {
  if (k_ < 2) throw std::invalid_argument("SIC-SDA needs at least two arms");
  ortho_ = std::make_unique<Orthogonalizer>(static_cast<int>(k_) - 1, ortho_seed_);
}

SicSdaPolicy::SicSdaPolicy(const PlayerContext& ctx, const SicResume& resume, SicOptions opts)
    : SicSdaPolicy(ctx, opts) {
  ortho_.reset();
  rank_ = resume.rank;
  m_ = resume.num_players;
  if (m_ < 1 || rank_ < 1 || rank_ > m_) throw std::invalid_argument("SicResume: bad rank");
  psi_ = resume.psi;
  bounds_ = resume.bounds;
  if (is_leader()) stats_.assign(k_, ArmStats{});
  start_phase();
}

void SicSdaPolicy::finish_rank_assign() {
  rank_ = 1 + ra_before_;
  m_ = 1 + ra_total_;
  bounds_ = fresh_bounds(k_, m_);
  psi_ = SicPlayerInfo{};
  for (ArmIndex a = 0; a < k_; ++a) psi_.active_arms.push_back(a);
  psi_.active_players = m_;
  psi_.allocation = sic_allocation(psi_.active_arms, m_, bounds_);
  psi_.phase = 1;
  if (is_leader()) stats_.assign(k_, ArmStats{});
  start_phase();
}

void SicSdaPolicy::start_phase() {
  if (psi_.exploit_arm) {
    stage_ = Stage::kExploit;
    return;
  }
  phase_sum_.assign(k_, 0);
  united_ = sic_united_arms(psi_, bounds_);
  stage_ = Stage::kIE;
  pos_ = 0;
  stage_len_ = static_cast<std::int64_t>(psi_.active_arms.size()) << psi_.phase;
}

void SicSdaPolicy::after_explore() {
  const auto kt = static_cast<int>(psi_.active_arms.size());
  senders_ = std::max(0, std::min(psi_.active_players, kt) - 1);
  width_ = commback_width(psi_.phase, m_);
  received_.assign(static_cast<std::size_t>(senders_), std::vector<std::int64_t>(static_cast<std::size_t>(kt), 0));
  if (senders_ > 0) {
    stage_ = Stage::kCommBack;
    pos_ = 0;
    stage_len_ = static_cast<std::int64_t>(senders_) * kt * width_;
    decoded_ = 0;
    return;
  }
  start_commforth();
}

void SicSdaPolicy::start_commforth() {
  if (is_leader()) {
    if (forced_phi_) {
      phi_ = *forced_phi_;
      forced_phi_.reset();
    } else {
      auto res = sic_acc_rej(stats_, psi_, bounds_, delta_, horizon_, m_);
      phi_ = std::move(res.info);
      crossings_ += res.bound_crossings;
    }
  }
  const auto kt = static_cast<std::int64_t>(psi_.active_arms.size());
  const std::int64_t mt = psi_.active_players;
  if (mt < 2) {
    finish_phase();
    return;
  }
  bound_bits_ = commforth_bound_bits(m_);
  step_start_.assign(6, 0);
  for (int s = 1; s <= 5; ++s)
    step_start_[s] = step_start_[s - 1] + kt * mt * (s <= 3 ? 1 : bound_bits_);
  forth_values_.assign(5, std::vector<int>(static_cast<std::size_t>(kt), 0));
  stage_ = Stage::kCommForth;
  pos_ = 0;
  stage_len_ = step_start_[5];
}

void SicSdaPolicy::finish_phase() {
  if (!is_leader()) phi_ = sic_forth_decode(forth_values_, psi_, bounds_, m_);
  last_phi_ = phi_;
  const int before = psi_.active_players;
  psi_ = sic_update(rank_, phi_, psi_);
  bounds_ = phi_.bounds;
  if (is_leader() && psi_.active_players != before)
    for (auto& s : stats_) {
      // United samples measured min(M_t, m_k)·μ_k; a new M_t changes the target.
      s.ue_sum = 0.0;
      s.ue_count = 0;
    }
  start_phase();
}

ArmIndex SicSdaPolicy::next_action(Slot) {
  switch (stage_) {
    case Stage::kOrtho:
      last_arm_ = ortho_->next_action();
      break;
    case Stage::kRankAssign:
      last_arm_ = rank_assign_arm(ext_rank_, static_cast<int>(pos_) + 1, k_);
      break;
    case Stage::kIE:
      last_arm_ = sic_ie_arm(rank_, pos_, psi_, bounds_);
      break;
    case Stage::kUE:
      last_arm_ = united_[static_cast<std::size_t>(pos_ % static_cast<std::int64_t>(united_.size()))];
      break;
    case Stage::kCommBack: {
      const auto& act = psi_.active_arms;
      const std::int64_t cell = pos_ / width_;
      const int bit = static_cast<int>(pos_ % width_);
      const int sender = 2 + static_cast<int>(cell / static_cast<std::int64_t>(act.size()));
      const auto kpos = static_cast<std::size_t>(cell % static_cast<std::int64_t>(act.size()));
      if (is_leader()) {
        last_arm_ = act[0];
      } else if (rank_ == sender) {
        const std::int64_t v = phase_sum_[act[kpos]];
        if (v < 0 || v >= (std::int64_t{1} << width_))
          throw ProtocolError("CommBack: value " + std::to_string(v) + " does not fit");
        last_arm_ = ((v >> (width_ - 1 - bit)) & 1) ? act[0] : act[1];
      } else {
        last_arm_ = act[1];
      }
      break;
    }
    case Stage::kCommForth: {
      const auto& act = psi_.active_arms;
      const auto kt = static_cast<std::int64_t>(act.size());
      const std::int64_t mt = psi_.active_players;
      int step = 1;
      while (pos_ >= step_start_[step]) ++step;
      const int w = step <= 3 ? 1 : bound_bits_;
      const std::int64_t q = pos_ - step_start_[step - 1];
      const std::int64_t cell = q / w;
      const int bit = static_cast<int>(q % w);
      const auto kpos = static_cast<std::size_t>(cell / mt);
      const int listener = 1 + static_cast<int>(cell % mt);
      const ArmIndex here = act[kpos];
      const ArmIndex next = act[(kpos + 1) % static_cast<std::size_t>(kt)];
      if (is_leader()) {
        const int v = sic_forth_value(step, here, phi_, bounds_);
        const bool signal = ((v >> (w - 1 - bit)) & 1) != 0;
        last_arm_ = signal ? here : next;
      } else {
        last_arm_ = rank_ == listener ? here : next;
      }
      break;
    }
    case Stage::kExploit:
      last_arm_ = *psi_.exploit_arm;
      break;
  }
  return last_arm_;
}

void SicSdaPolicy::observe(const Observation& obs) {
  const bool shared = obs.is_shared();
  switch (stage_) {
    case Stage::kOrtho:
      ortho_->observe(shared);
      if (ortho_->done()) {
        ext_rank_ = ortho_->rank();
        ortho_.reset();
        stage_ = Stage::kRankAssign;
        pos_ = 0;
      }
      return;
    case Stage::kRankAssign:
      if (shared) {
        ++ra_total_;
        if (pos_ + 1 <= 2 * ext_rank_) ++ra_before_;
      }
      if (++pos_ == 2 * static_cast<std::int64_t>(k_) - 2) finish_rank_assign();
      return;
    case Stage::kIE: {
      const auto kt = static_cast<int>(psi_.active_arms.size());
      if (rank_ <= kt) {
        const auto kpos = static_cast<std::size_t>((rank_ + pos_) % kt);
        const auto raw = static_cast<std::int64_t>(obs.reward + 0.5);
        phase_sum_[obs.arm] += raw;
        if (is_leader()) {
          stats_[obs.arm].ie_sum += obs.reward / static_cast<double>(psi_.allocation[kpos]);
          ++stats_[obs.arm].ie_count;
        }
      }
      if (++pos_ == stage_len_) {
        if (!united_.empty()) {
          stage_ = Stage::kUE;
          pos_ = 0;
          stage_len_ = static_cast<std::int64_t>(united_.size()) << psi_.phase;
        } else {
          after_explore();
        }
      }
      return;
    }
    case Stage::kUE:
      if (is_leader()) {
        stats_[obs.arm].ue_sum += obs.reward;
        ++stats_[obs.arm].ue_count;
      }
      if (++pos_ == stage_len_) after_explore();
      return;
    case Stage::kCommBack: {
      if (is_leader()) {
        decoded_ = (decoded_ << 1) | (shared ? 1 : 0);
        if ((pos_ + 1) % width_ == 0) {
          const std::int64_t cell = pos_ / width_;
          const auto kt = static_cast<std::int64_t>(psi_.active_arms.size());
          const auto sender_idx = static_cast<std::size_t>(cell / kt);
          const auto kpos = static_cast<std::size_t>(cell % kt);
          const ArmIndex arm = psi_.active_arms[kpos];
          received_[sender_idx][kpos] = decoded_;
          stats_[arm].ie_sum += static_cast<double>(decoded_) / static_cast<double>(psi_.allocation[kpos]);
          stats_[arm].ie_count += std::int64_t{1} << psi_.phase;
          decoded_ = 0;
        }
      }
      if (++pos_ == stage_len_) start_commforth();
      return;
    }
    case Stage::kCommForth: {
      if (!is_leader()) {
        int step = 1;
        while (pos_ >= step_start_[step]) ++step;
        const int w = step <= 3 ? 1 : bound_bits_;
        const std::int64_t q = pos_ - step_start_[step - 1];
        const std::int64_t cell = q / w;
        const auto mt = static_cast<std::int64_t>(psi_.active_players);
        const int listener = 1 + static_cast<int>(cell % mt);
        if (listener == rank_) {
          auto& v = forth_values_[static_cast<std::size_t>(step - 1)][static_cast<std::size_t>(cell / mt)];
          v = (v << 1) | (shared ? 1 : 0);
        }
      }
      if (++pos_ == stage_len_) finish_phase();
      return;
    }
    case Stage::kExploit:
      return;
  }
}

PhaseTag SicSdaPolicy::phase() const {
  switch (stage_) {
    case Stage::kOrtho:
    case Stage::kRankAssign:
      return PhaseTag::kInit;
    case Stage::kIE:
    case Stage::kUE:
      return PhaseTag::kExplore;
    case Stage::kCommBack:
    case Stage::kCommForth:
      return PhaseTag::kComm;
    case Stage::kExploit:
      return PhaseTag::kExploit;
  }
  return PhaseTag::kExploit;
}

}  // namespace mmab
