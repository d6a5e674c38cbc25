#include "mmab/dpe_sdi.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "mmab/errors.hpp"

namespace mmab {

namespace {

bool contains(const std::vector<ArmIndex>& v, ArmIndex k) {
  return std::binary_search(v.begin(), v.end(), k);
}

}  // namespace

DpeSharedInfo initial_dpe_info(std::size_t num_arms, int num_players) {
  DpeSharedInfo info;
  for (int k = 0; k < num_players; ++k) info.optimal_set.push_back(static_cast<ArmIndex>(k));
  info.least_favored = static_cast<ArmIndex>(num_players - 1);
  info.bounds = fresh_bounds(num_arms, num_players);
  return info;
}

AssignmentProfile recover_profile(const DpeSharedInfo& info, int num_players) {
  AssignmentProfile a;
  a.counts.assign(info.bounds.size(), 0);
  if (!contains(info.optimal_set, info.least_favored))
    throw ProtocolError("recover_profile: least favored arm not in optimal set");
  int used = 0;
  for (ArmIndex k : info.optimal_set) {
    if (k >= a.counts.size()) throw ProtocolError("recover_profile: arm out of range");
    if (k == info.least_favored) continue;
    a.counts[k] = info.bounds[k].lower;
    used += info.bounds[k].lower;
  }
  const int rest = num_players - used;
  if (rest <= 0)
    throw ProtocolError("recover_profile: least favored arm gets " + std::to_string(rest) +
                        " players");
  a.counts[info.least_favored] = rest;
  return a;
}

ArmIndex rotation_arm(int rank, Slot t, const AssignmentProfile& profile, int num_players) {
  const auto m = static_cast<Slot>(num_players);
  const Slot c = ((static_cast<Slot>(rank) + t - 1) % m + m) % m + 1;
  Slot prefix = 0;
  for (std::size_t j = 0; j < profile.counts.size(); ++j) {
    prefix += profile.counts[j];
    if (prefix >= c) return j;
  }
  throw ProtocolError("rotation_arm: profile sums below the circulating rank");
}

DpeLeaderUpdate leader_update(const PlayerStats& stats, const DpeSharedInfo& info,
                              int num_players, double delta, Slot t) {
  const std::size_t k = stats.size();
  DpeLeaderUpdate out;
  out.info.bounds = info.bounds;
  std::vector<double> mu(k);
  std::vector<int> lower(k);
  for (std::size_t a = 0; a < k; ++a) {
    const auto up = update_capacity_bounds(stats[a], info.bounds[a], delta, num_players);
    out.info.bounds[a] = up.bounds;
    out.bound_crossings += up.crossed ? 1 : 0;
    mu[a] = stats[a].mu_hat();
    lower[a] = up.bounds.lower;
  }
  const OptimalProfile opt = oracle(mu, lower, num_players);
  for (std::size_t a = 0; a < k; ++a)
    if (opt.profile.counts[a] > 0) out.info.optimal_set.push_back(a);
  out.info.least_favored = opt.least_favored;
  const double mu_l = mu[opt.least_favored];
  for (std::size_t a = 0; a < k; ++a) {
    if (opt.profile.counts[a] != 0) continue;
    if (klucb_index(mu[a], stats[a].ie_count, t) >= mu_l) out.exploration_set.push_back(a);
  }
  return out;
}

bool dpe_comm_condition(int step, ArmIndex k, const DpeSharedInfo& next,
                        const DpeSharedInfo& pre) {
  switch (step) {
    case 2: return contains(pre.optimal_set, k) && !contains(next.optimal_set, k);
    case 3: return !contains(pre.optimal_set, k) && contains(next.optimal_set, k);
    case 4: return k == next.least_favored;
    case 5: return next.bounds[k].lower > pre.bounds[k].lower;
    case 6: return next.bounds[k].upper < pre.bounds[k].upper;
    default: throw std::invalid_argument("dpe_comm_condition: step must be 2..6");
  }
}

void dpe_comm_apply(int step, ArmIndex k, DpeSharedInfo& info, int num_players) {
  auto& s = info.optimal_set;
  switch (step) {
    case 2: {
      auto it = std::lower_bound(s.begin(), s.end(), k);
      if (it == s.end() || *it != k) throw ProtocolError("comm: removing an arm not in S");
      s.erase(it);
      return;
    }
    case 3: {
      auto it = std::lower_bound(s.begin(), s.end(), k);
      if (it != s.end() && *it == k) throw ProtocolError("comm: adding an arm already in S");
      s.insert(it, k);
      return;
    }
    case 4:
      info.least_favored = k;
      return;
    case 5:
      if (++info.bounds[k].lower > num_players) throw ProtocolError("comm: lower bound above M");
      return;
    case 6:
      if (--info.bounds[k].upper < 1) throw ProtocolError("comm: upper bound below 1");
      return;
    default:
      throw std::invalid_argument("dpe_comm_apply: step must be 2..6");
  }
}

DpeSharedInfo dpe_comm_message(const DpeSharedInfo& current, const DpeSharedInfo& target) {
  DpeSharedInfo msg = target;
  for (std::size_t a = 0; a < msg.bounds.size(); ++a) {
    msg.bounds[a].lower = std::min(target.bounds[a].lower, current.bounds[a].lower + 1);
    msg.bounds[a].upper = std::max(target.bounds[a].upper, current.bounds[a].upper - 1);
  }
  return msg;
}

std::vector<ArmIndex> dpe_leader_comm_schedule(const DpeSharedInfo& next, const DpeSharedInfo& pre,
                                               int num_players, std::size_t num_arms) {
  std::vector<ArmIndex> out;
  out.reserve(5 * num_arms);
  const auto m = static_cast<ArmIndex>(num_players);
  for (int step = kDpeFirstStep; step <= kDpeLastStep; ++step)
    for (ArmIndex k = 0; k < num_arms; ++k)
      out.push_back(dpe_comm_condition(step, k, next, pre) ? k : (k + 1) % m);
  return out;
}

DpeSdiPolicy::DpeSdiPolicy(const PlayerContext& ctx, DpeOptions opts)
    : k_(ctx.info.num_arms),
      horizon_(ctx.info.horizon),
      delta_(opts.delta > 0.0 ? opts.delta : 2.0 / static_cast<double>(std::max<std::int64_t>(ctx.info.horizon, 3))),
      rng_(ctx.rng_seed),
      ortho_seed_(splitmix64(ctx.rng_seed ^ 0x6f7274686fULL)) {
  if (ctx.info.feedback != Feedback::kSharingInfo)
    throw UnsupportedFeedback("DPE-SDI needs sharing-demand information (counts)");
  if (k_ < 2) throw std::invalid_argument("DPE-SDI needs at least two arms");
}

DpeSdiPolicy::DpeSdiPolicy(const PlayerContext& ctx, const DpeResume& resume, DpeOptions opts)
    : DpeSdiPolicy(ctx, opts) {
  m_ = resume.num_players;
  rank_ = resume.rank;
  if (m_ < 1 || rank_ < 1 || rank_ > m_ || static_cast<std::size_t>(m_) >= k_)
    throw std::invalid_argument("DpeResume: bad rank or player count");
  shared_ = resume.shared;
  target_ = resume.leader_target.value_or(resume.shared);
  if (is_leader()) stats_.assign(k_, ArmStats{});
  start_round();
}

void DpeSdiPolicy::finish_init() {
  shared_ = initial_dpe_info(k_, m_);
  target_ = shared_;
  if (is_leader()) stats_.assign(k_, ArmStats{});
  stage_ = Stage::kWarmup;
  pos_ = 0;
}

ArmIndex DpeSdiPolicy::park_arm() const {
  // Highest μ̂ among S; with a single optimal arm, the best arm outside S.
  const bool inside = shared_.optimal_set.size() >= 2;
  ArmIndex best = k_;
  double best_mu = -1.0;
  for (ArmIndex a = 0; a < k_; ++a) {
    if (contains(shared_.optimal_set, a) != inside) continue;
    const double mu = stats_[a].mu_hat();
    if (mu > best_mu) {
      best_mu = mu;
      best = a;
    }
  }
  return best;
}

void DpeSdiPolicy::start_round() {
  ahat_ = recover_profile(shared_, m_);
  degenerate_ = shared_.optimal_set.size() == 1;
  sprime_.clear();
  for (ArmIndex a : shared_.optimal_set)
    if (!shared_.bounds[a].learned()) sprime_.push_back(a);
  stage_ = Stage::kHead;
  pos_ = 0;
  comm_ = false;
  got_least_ = false;
  if (is_leader() && m_ >= 2 && !(target_ == shared_)) {
    comm_ = true;
    message_ = dpe_comm_message(shared_, target_);
    schedule_ = dpe_leader_comm_schedule(message_, shared_, m_, k_);
  }
}

void DpeSdiPolicy::leader_refresh() {
  for (const auto& s : stats_)
    if (s.ie_count == 0) return;
  auto up = leader_update(stats_, target_, m_, delta_, now_);
  target_ = std::move(up.info);
  explore_ = std::move(up.exploration_set);
  crossings_ += up.bound_crossings;
  if (m_ == 1) shared_ = target_;
}

void DpeSdiPolicy::end_normal_round() {
  if (is_leader()) leader_refresh();
  start_round();
}

ArmIndex DpeSdiPolicy::next_action(Slot t) {
  now_ = t;
  switch (stage_) {
    case Stage::kRally:
      last_arm_ = 0;
      break;
    case Stage::kOrtho:
      last_arm_ = ortho_->next_action();
      break;
    case Stage::kWarmup:
      last_arm_ = static_cast<ArmIndex>((static_cast<std::size_t>(rank_ - 1) + static_cast<std::size_t>(pos_)) % k_);
      last_divisor_ = 1.0;
      break;
    case Stage::kHead: {
      if (is_leader() && comm_) {
        last_arm_ = park_arm();
        break;
      }
      const ArmIndex j = rotation_arm(rank_, t, ahat_, m_);
      last_arm_ = j;
      last_divisor_ = static_cast<double>(ahat_.counts[j]);
      last_explored_ = false;
      if (is_leader() && !explore_.empty() && j == shared_.least_favored &&
          !(degenerate_ && m_ >= 2 && pos_ == 0)) {
        if (uniform_unit(rng_) < 0.5) {
          last_arm_ = explore_[uniform_index(rng_, explore_.size())];
          last_divisor_ = 1.0;
          last_explored_ = true;
        }
      }
      break;
    }
    case Stage::kComm: {
      const auto k = static_cast<ArmIndex>(pos_ % static_cast<std::int64_t>(k_));
      last_arm_ = is_leader() ? schedule_[static_cast<std::size_t>(pos_)] : k;
      break;
    }
    case Stage::kUnited:
      last_arm_ = sprime_[static_cast<std::size_t>(pos_)];
      break;
  }
  return last_arm_;
}

void DpeSdiPolicy::observe(const Observation& obs) {
  const int count = obs.sharing_count().value_or(obs.is_shared() ? 2 : 1);
  switch (stage_) {
    case Stage::kRally:
      rally_count_ = count;
      m_ = count;
      if (static_cast<std::size_t>(m_) >= k_)
        throw ProtocolError("DPE-SDI: rally saw at least as many players as arms");
      if (m_ == 1) {
        rank_ = 1;
        finish_init();
      } else {
        ortho_ = std::make_unique<Orthogonalizer>(m_, ortho_seed_);
        stage_ = Stage::kOrtho;
      }
      return;
    case Stage::kOrtho:
      ortho_->observe(count > 1);
      if (ortho_->done()) {
        rank_ = ortho_->rank();
        ortho_slots_ = ortho_->slots_used();
        ortho_.reset();
        finish_init();
      }
      return;
    case Stage::kWarmup:
      if (is_leader()) {
        stats_[obs.arm].ie_sum += obs.reward / static_cast<double>(count);
        ++stats_[obs.arm].ie_count;
      }
      if (++pos_ == static_cast<std::int64_t>(k_)) {
        if (is_leader()) leader_refresh();
        start_round();
      }
      return;
    case Stage::kHead: {
      if (is_leader()) {
        if (!comm_) {
          auto& s = stats_[obs.arm];
          s.ie_sum += obs.reward / last_divisor_;
          ++s.ie_count;
        }
      } else {
        const int expect = ahat_.counts[obs.arm];
        if (count > expect || (degenerate_ && pos_ == 0 && count < expect)) comm_ = true;
      }
      if (++pos_ == m_) {
        pos_ = 0;
        if (comm_) {
          stage_ = Stage::kComm;
          incoming_ = shared_;
        } else if (!sprime_.empty()) {
          stage_ = Stage::kUnited;
        } else {
          end_normal_round();
        }
      }
      return;
    }
    case Stage::kComm: {
      if (!is_leader() && count == m_) {
        const int step = kDpeFirstStep + static_cast<int>(pos_ / static_cast<std::int64_t>(k_));
        if (step == 4) {
          if (got_least_) throw ProtocolError("comm: two least-favored signals in one round");
          got_least_ = true;
        }
        dpe_comm_apply(step, obs.arm, incoming_, m_);
      }
      if (++pos_ == 5 * static_cast<std::int64_t>(k_)) {
        if (is_leader()) {
          shared_ = message_;
        } else {
          for (const auto& b : incoming_.bounds)
            if (b.lower > b.upper) throw ProtocolError("comm: received crossed capacity bounds");
          shared_ = incoming_;
        }
        start_round();  // validates the received state through recover_profile
      }
      return;
    }
    case Stage::kUnited:
      if (is_leader()) {
        auto& s = stats_[obs.arm];
        s.ue_sum += obs.reward;
        ++s.ue_count;
      }
      if (++pos_ == static_cast<std::int64_t>(sprime_.size())) end_normal_round();
      return;
  }
}

PhaseTag DpeSdiPolicy::phase() const {
  switch (stage_) {
    case Stage::kRally:
    case Stage::kOrtho:
    case Stage::kWarmup:
      return PhaseTag::kInit;
    case Stage::kHead:
      if (comm_ && is_leader()) return PhaseTag::kComm;
      return last_explored_ ? PhaseTag::kExplore : PhaseTag::kExploit;
    case Stage::kComm:
      return PhaseTag::kComm;
    case Stage::kUnited:
      return PhaseTag::kExplore;
  }
  return PhaseTag::kExploit;
}

}  // namespace mmab
