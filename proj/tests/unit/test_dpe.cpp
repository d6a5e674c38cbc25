#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "dpe_helpers.hpp"
#include "mmab/dpe_sdi.hpp"
#include "mmab/engine.hpp"
#include "mmab/errors.hpp"
#include "oracles.hpp"

using namespace mmab;

namespace {

EnvSpec synthetic(int M, std::uint64_t seed, std::int64_t T) {
  EnvSpec s;
  s.means = {0.9, 0.85, 0.8, 0.75, 0.7, 0.65, 0.6};
  s.capacities = {2, 1, 3, 1, 2, 1, 2};
  for (auto& c : s.capacities) c = std::min(c, M);
  s.num_players = M;
  s.horizon = T;
  s.seed = seed;
  return s;
}

PolicyFactory dpe_factory() {
  return [](const PlayerContext& ctx) -> std::unique_ptr<Policy> {
    return std::make_unique<DpeSdiPolicy>(ctx);
  };
}

const DpeSdiPolicy& as_dpe(const std::unique_ptr<Policy>& p) {
  return static_cast<const DpeSdiPolicy&>(*p);
}

// Seat p resumes as rank p+1; the leader is told to move toward `target`.
PolicyFactory resume_factory(const DpeSharedInfo& shared, const DpeSharedInfo& target, int M) {
  return [=](const PlayerContext& ctx) -> std::unique_ptr<Policy> {
    DpeResume r;
    r.rank = static_cast<int>(ctx.player_slot) + 1;
    r.num_players = M;
    r.shared = shared;
    if (r.rank == 1) r.leader_target = target;
    return std::make_unique<DpeSdiPolicy>(ctx, r);
  };
}

oracles::DpeCommState to_oracle(const DpeSharedInfo& info) {
  oracles::DpeCommState s;
  for (auto a : info.optimal_set) s.optimal_set.push_back(static_cast<int>(a));
  s.least_favored = static_cast<int>(info.least_favored);
  for (const auto& b : info.bounds) {
    s.lower.push_back(b.lower);
    s.upper.push_back(b.upper);
  }
  return s;
}

}  // namespace

TEST_CASE("rally counts every player") {
  for (int M : {1, 2, 6}) {
    const EnvSpec s = synthetic(M, 1, 50);
    int checked = 0;
    RunOptions opts;
    opts.on_slot = [&](const SlotView& v) {
      if (v.t != 1) return;
      for (const auto& p : v.policies) {
        CHECK(as_dpe(p).rally_count() == M);
        if (M == 1) CHECK(as_dpe(p).initialized());
        ++checked;
      }
    };
    run(dpe_factory(), s, opts);
    CHECK(checked == M);
  }
}

TEST_CASE("awareness feedback is refused") {
  PlayerContext ctx{0, PublicInfo{5, 100, Feedback::kSharingAwareness}, 1};
  CHECK_THROWS_AS(DpeSdiPolicy{ctx}, UnsupportedFeedback);
}

TEST_CASE("initialization ends with distinct ranks") {
  for (int M = 2; M <= 5; ++M)
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const EnvSpec s = synthetic(M, seed, 3000);
      std::set<int> ranks;
      bool seen = false;
      RunOptions opts;
      opts.on_slot = [&](const SlotView& v) {
        if (seen) return;
        for (const auto& p : v.policies)
          if (!as_dpe(p).initialized()) return;
        seen = true;
        for (const auto& p : v.policies) ranks.insert(as_dpe(p).rank());
      };
      run(dpe_factory(), s, opts);
      REQUIRE(seen);
      CHECK(ranks.size() == static_cast<std::size_t>(M));
      CHECK(*ranks.begin() == 1);
      CHECK(*ranks.rbegin() == M);
    }
}

TEST_CASE("recover profile") {
  DpeSharedInfo info;
  info.bounds = fresh_bounds(5, 4);
  info.bounds[0].lower = 2;
  info.optimal_set = {0, 1};
  info.least_favored = 1;
  CHECK(recover_profile(info, 4).counts == std::vector<int>{2, 2, 0, 0, 0});

  info.optimal_set = {3};
  info.least_favored = 3;
  CHECK(recover_profile(info, 4).counts == std::vector<int>{0, 0, 0, 4, 0});

  info.bounds[2].lower = 1;
  info.optimal_set = {0, 2, 4};
  info.least_favored = 4;
  CHECK(recover_profile(info, 4).counts == std::vector<int>{2, 0, 1, 0, 1});

  info.least_favored = 1;  // not in S
  CHECK_THROWS_AS(recover_profile(info, 4), ProtocolError);
  info.least_favored = 4;
  info.bounds[2].lower = 2;  // nothing left for L
  CHECK_THROWS_AS(recover_profile(info, 4), ProtocolError);
}

TEST_CASE("rotation over a profile") {
  const AssignmentProfile a{{2, 1}};
  // c = ((rank + t - 1) mod 3) + 1; at t = 1 rank r has c = (r mod 3) + 1
  CHECK(rotation_arm(3, 1, a, 3) == 0);  // c = 1
  CHECK(rotation_arm(1, 1, a, 3) == 0);  // c = 2
  CHECK(rotation_arm(2, 1, a, 3) == 1);  // c = 3
  const AssignmentProfile all{{0, 0, 4}};
  for (int r = 1; r <= 4; ++r)
    for (Slot t = 1; t < 9; ++t) CHECK(rotation_arm(r, t, all, 4) == 2);
}

TEST_CASE("property: rotation is a permutation of the profile") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int M = 1 + static_cast<int>(rng() % 7);
    const std::size_t K = static_cast<std::size_t>(M) + 1 + rng() % 3;
    AssignmentProfile a;
    a.counts.assign(K, 0);
    for (int i = 0; i < M; ++i) ++a.counts[rng() % K];
    const Slot t0 = 1 + static_cast<Slot>(rng() % 1000);
    std::vector<std::vector<int>> visits(M, std::vector<int>(K, 0));
    for (Slot t = t0; t < t0 + M; ++t) {
      std::vector<int> load(K, 0);
      for (int r = 1; r <= M; ++r) {
        const ArmIndex j = rotation_arm(r, t, a, M);
        ++load[j];
        ++visits[r - 1][j];
      }
      CHECK(load == a.counts);
    }
    for (int r = 0; r < M; ++r) CHECK(visits[r] == a.counts);
  }
}

TEST_CASE("leader update with exact statistics") {
  const std::vector<double> mu{0.5, 0.9, 0.3, 0.7, 0.6};
  const std::vector<int> cap{1, 2, 2, 1, 3};
  const int M = 4;
  PlayerStats stats(5);
  DpeSharedInfo info = initial_dpe_info(5, M);
  for (std::size_t a = 0; a < 5; ++a) {
    stats[a].ie_count = 1000000;
    stats[a].ie_sum = mu[a] * 1000000;
    info.bounds[a] = {cap[a], cap[a]};
  }
  const auto up = leader_update(stats, info, M, 0.01, 2000000);
  const auto opt = oracle(mu, cap, M);
  std::vector<ArmIndex> expect_s;
  for (std::size_t a = 0; a < 5; ++a)
    if (opt.profile.counts[a] > 0) expect_s.push_back(a);
  CHECK(up.info.optimal_set == expect_s);
  CHECK(up.info.least_favored == opt.least_favored);
  CHECK(up.exploration_set.empty());
  CHECK(recover_profile(up.info, M) == opt.profile);
}

TEST_CASE("an under-sampled arm enters the exploration set") {
  const std::vector<double> mu{0.5, 0.9, 0.3, 0.7, 0.6};
  const int M = 2;
  PlayerStats stats(5);
  DpeSharedInfo info = initial_dpe_info(5, M);
  for (std::size_t a = 0; a < 5; ++a) {
    stats[a].ie_count = 100000;
    stats[a].ie_sum = mu[a] * 100000;
    info.bounds[a] = {1, 1};
  }
  stats[2].ie_count = 3;
  stats[2].ie_sum = 1;
  const Slot t = 500000;
  const auto up = leader_update(stats, info, M, 0.01, t);
  CHECK(up.info.optimal_set == std::vector<ArmIndex>{1, 3});
  CHECK(up.info.least_favored == 3);
  // the independent grid scan decides who belongs in E
  std::vector<ArmIndex> expect_e;
  for (ArmIndex a : {0, 2, 4})
    if (oracles::klucb_grid(stats[a].mu_hat(), stats[a].ie_count, t, 1e-6) >= 0.7) expect_e.push_back(a);
  CHECK(expect_e == std::vector<ArmIndex>{2});
  CHECK(up.exploration_set == expect_e);
}

TEST_CASE("communication schedule matches the hand simulation") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const int M = 2 + static_cast<int>(rng() % 5);
    const std::size_t K = static_cast<std::size_t>(M) + 1 + rng() % 3;
    const DpeSharedInfo pre = dpe_test::random_successor(initial_dpe_info(K, M), M, rng);
    const DpeSharedInfo next = dpe_test::random_successor(pre, M, rng);
    const auto sched = dpe_leader_comm_schedule(next, pre, M, K);
    REQUIRE(sched.size() == 5 * K);
    std::vector<oracles::CommEvent> got;
    for (std::size_t i = 0; i < sched.size(); ++i)
      if (sched[i] == i % K) got.push_back({kDpeFirstStep + static_cast<int>(i / K), static_cast<int>(i % K)});
    const auto want = oracles::simulate_dpe_comm(to_oracle(pre), to_oracle(next), M, static_cast<int>(K));
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].step == want[i].step);
      CHECK(got[i].arm == want[i].arm);
    }
  }
}

TEST_CASE("single least-favored change gives one step-4 signal") {
  const int M = 4;
  DpeSharedInfo pre = initial_dpe_info(6, M);
  DpeSharedInfo next = pre;
  next.least_favored = 1;
  const auto events = oracles::simulate_dpe_comm(to_oracle(pre), to_oracle(next), M, 6);
  REQUIRE(events.size() == 1);
  CHECK(events[0].step == 4);
  CHECK(events[0].arm == 1);

  DpeSharedInfo up = pre;
  up.bounds[2].lower = 2;
  const auto sched = dpe_leader_comm_schedule(up, pre, M, 6);
  int step5 = 0, others = 0;
  for (std::size_t i = 0; i < sched.size(); ++i)
    if (sched[i] == i % 6) (i / 6 == 3 ? step5 : others) += 1;
  CHECK(step5 == 1);
  CHECK(sched[3 * 6 + 2] == 2);
  CHECK(others == 1);  // the step-4 slot for L
}

TEST_CASE("follower apply rejects inconsistent signals") {
  DpeSharedInfo info = initial_dpe_info(5, 3);
  CHECK_THROWS_AS(dpe_comm_apply(2, 4, info, 3), ProtocolError);
  CHECK_THROWS_AS(dpe_comm_apply(3, 0, info, 3), ProtocolError);
  info.bounds[1].lower = 3;
  CHECK_THROWS_AS(dpe_comm_apply(5, 1, info, 3), ProtocolError);
  info.bounds[2].upper = 1;
  CHECK_THROWS_AS(dpe_comm_apply(6, 2, info, 3), ProtocolError);
}

TEST_CASE("message moves bounds one unit at a time") {
  DpeSharedInfo cur = initial_dpe_info(4, 3);
  DpeSharedInfo target = cur;
  target.bounds[0] = {3, 3};
  target.bounds[1] = {1, 1};
  const auto msg = dpe_comm_message(cur, target);
  CHECK(msg.bounds[0] == CapacityInterval{2, 3});
  CHECK(msg.bounds[1] == CapacityInterval{1, 2});
  CHECK(msg.optimal_set == target.optimal_set);
}

TEST_CASE("round trip through the engine") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 40; ++trial) {
    const int M = 2 + static_cast<int>(rng() % 4);
    const EnvSpec s = synthetic(M, 100 + trial, 4000);
    const std::size_t K = s.num_arms();
    const DpeSharedInfo pre = dpe_test::random_successor(initial_dpe_info(K, M), M, rng);
    const DpeSharedInfo target = dpe_test::random_successor(pre, M, rng);
    bool converged = false;
    RunOptions opts;
    opts.on_slot = [&](const SlotView& v) {
      if (converged) return;
      for (const auto& p : v.policies)
        if (!(as_dpe(p).shared_info() == target) || as_dpe(p).in_comm()) return;
      converged = true;
    };
    run(resume_factory(pre, target, M), s, opts);
    CHECK(converged);
  }
}

TEST_CASE("no false triggers without leader deviation") {
  const int M = 4;
  EnvSpec s = synthetic(M, 8, 10000);
  DpeSharedInfo info = initial_dpe_info(s.num_arms(), M);
  info.optimal_set = {0, 2};
  info.least_favored = 2;
  info.bounds[0] = {2, 2};
  int triggers = 0;
  RunOptions opts;
  opts.on_slot = [&](const SlotView& v) {
    for (const auto& p : v.policies) triggers += as_dpe(p).in_comm() ? 1 : 0;
  };
  const auto trace = run(resume_factory(info, info, M), s, opts);
  CHECK(triggers == 0);
}

TEST_CASE("property: invariants along a full run") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const int M = 3;
    const EnvSpec s = synthetic(M, seed, 20000);
    int violations = 0, explored = 0;
    RunOptions opts;
    opts.on_slot = [&](const SlotView& v) {
      for (std::size_t p = 0; p < v.policies.size(); ++p) {
        const auto& d = as_dpe(v.policies[p]);
        if (!d.in_rounds()) continue;
        const auto& info = d.shared_info();
        if (!std::binary_search(info.optimal_set.begin(), info.optimal_set.end(), info.least_favored))
          ++violations;
        if (d.recovered_profile().total() != M) ++violations;
        for (const auto& b : info.bounds)
          if (b.lower < 1 || b.lower > b.upper || b.upper > M) ++violations;
        if (!d.is_leader()) {
          if (!d.stats().empty()) ++violations;
          continue;
        }
        const auto a = recover_profile(d.leader_target(), M);
        for (ArmIndex e : d.exploration_set())
          if (a.counts[e] != 0) ++violations;
        // a solo pull outside S is a parsimonious exploration
        const auto& o = v.observations[p];
        if (!std::binary_search(info.optimal_set.begin(), info.optimal_set.end(), o.arm) &&
            o.sharing_count() == 1)
          ++explored;
      }
    };
    run(dpe_factory(), s, opts);
    CHECK(violations == 0);
    CHECK(explored > 0);
  }
}
