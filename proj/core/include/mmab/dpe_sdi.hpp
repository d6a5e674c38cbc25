#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "mmab/engine.hpp"
#include "mmab/orthogonalize.hpp"
#include "mmab/stats.hpp"

namespace mmab {

/// State the leader keeps in sync with every follower: S, L, m^l, m^u.
struct DpeSharedInfo {
  std::vector<ArmIndex> optimal_set;  // ascending
  ArmIndex least_favored = 0;
  CapacityBounds bounds;

  bool operator==(const DpeSharedInfo&) const = default;
};

/// Starting Υ: S = {0..M-1}, L = M-1, bounds [1, M].
DpeSharedInfo initial_dpe_info(std::size_t num_arms, int num_players);

/// â*: m^l on S\{L}, the remainder on L, zero elsewhere.
/// Throws ProtocolError if the remainder is not positive or L is not in S.
AssignmentProfile recover_profile(const DpeSharedInfo& info, int num_players);

/// Arm for 1-based rank at slot t under the rotation rule with circulating
/// rank ((rank + t - 1) mod M) + 1.
ArmIndex rotation_arm(int rank, Slot t, const AssignmentProfile& profile, int num_players);

struct DpeLeaderUpdate {
  DpeSharedInfo info;
  std::vector<ArmIndex> exploration_set;  // E
  int bound_crossings = 0;
};

/// Refresh bounds, re-run the oracle on (μ̂, m^l) and rebuild S, L, E.
/// Every arm needs at least one IE sample.
DpeLeaderUpdate leader_update(const PlayerStats& stats, const DpeSharedInfo& info,
                              int num_players, double delta, Slot t);

/// Communication steps 2..6 (remove, add, least favored, lower+1, upper-1).
inline constexpr int kDpeFirstStep = 2;
inline constexpr int kDpeLastStep = 6;

/// Leader-side condition for signalling arm k at `step`.
bool dpe_comm_condition(int step, ArmIndex k, const DpeSharedInfo& next,
                        const DpeSharedInfo& pre);

/// Follower-side update on receiving a signal for arm k at `step`.
void dpe_comm_apply(int step, ArmIndex k, DpeSharedInfo& info, int num_players);

/// What one communication round can carry toward `target`: S and L as in
/// the target, each bound moved by at most one unit.
DpeSharedInfo dpe_comm_message(const DpeSharedInfo& current, const DpeSharedInfo& target);

/// Leader arms for steps 2..6 (5K slots): k when signalling, else (k+1) mod M.
std::vector<ArmIndex> dpe_leader_comm_schedule(const DpeSharedInfo& next, const DpeSharedInfo& pre,
                                               int num_players, std::size_t num_arms);

struct DpeOptions {
  double delta = 0.0;  // confidence for capacity bounds; <= 0 means 2/T
};

/// Mid-run starting point: skips rally, orthogonalization and warm-up and
/// begins at a round boundary. Used to exercise communication directly.
struct DpeResume {
  int rank = 1;
  int num_players = 1;
  DpeSharedInfo shared;
  std::optional<DpeSharedInfo> leader_target;  // leader only
};

class DpeSdiPolicy final : public Policy {
 public:
  explicit DpeSdiPolicy(const PlayerContext& ctx, DpeOptions opts = {});
  DpeSdiPolicy(const PlayerContext& ctx, const DpeResume& resume, DpeOptions opts = {});

  ArmIndex next_action(Slot t) override;
  void observe(const Observation& obs) override;
  PhaseTag phase() const override;

  bool initialized() const { return stage_ != Stage::kRally && stage_ != Stage::kOrtho; }
  bool in_rounds() const { return stage_ == Stage::kHead || stage_ == Stage::kComm || stage_ == Stage::kUnited; }
  bool in_comm() const { return stage_ == Stage::kComm || comm_; }
  bool is_leader() const { return rank_ == 1; }
  int rank() const { return rank_; }
  int num_players() const { return m_; }
  std::optional<int> rally_count() const { return rally_count_; }
  std::int64_t orthogonalization_slots() const { return ortho_slots_; }
  const DpeSharedInfo& shared_info() const { return shared_; }
  const AssignmentProfile& recovered_profile() const { return ahat_; }
  const PlayerStats& stats() const { return stats_; }
  const DpeSharedInfo& leader_target() const { return target_; }
  const std::vector<ArmIndex>& exploration_set() const { return explore_; }
  int bound_crossings() const { return crossings_; }

 private:
  enum class Stage { kRally, kOrtho, kWarmup, kHead, kComm, kUnited };

  void finish_init();
  void start_round();
  void end_normal_round();
  void leader_refresh();
  ArmIndex park_arm() const;

  std::size_t k_;
  std::int64_t horizon_;
  double delta_;
  Rng rng_;
  std::uint64_t ortho_seed_;

  Stage stage_ = Stage::kRally;
  int m_ = 0;
  int rank_ = 0;
  std::optional<int> rally_count_;
  std::unique_ptr<Orthogonalizer> ortho_;
  std::int64_t ortho_slots_ = 0;

  DpeSharedInfo shared_;
  AssignmentProfile ahat_;
  std::vector<ArmIndex> sprime_;
  bool degenerate_ = false;

  // Position inside the current stage and the current slot.
  std::int64_t pos_ = 0;
  Slot now_ = 0;
  ArmIndex last_arm_ = 0;
  double last_divisor_ = 1.0;
  bool last_explored_ = false;

  // Round-level communication state.
  bool comm_ = false;  // leader: sending; follower: detected
  DpeSharedInfo incoming_;
  bool got_least_ = false;

  // Leader only.
  PlayerStats stats_;
  DpeSharedInfo target_;
  DpeSharedInfo message_;
  std::vector<ArmIndex> explore_;
  std::vector<ArmIndex> schedule_;
  int crossings_ = 0;
};

}  // namespace mmab
