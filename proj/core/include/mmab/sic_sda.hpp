#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "mmab/engine.hpp"
#include "mmab/orthogonalize.hpp"
#include "mmab/stats.hpp"

namespace mmab {

/// Leader decisions broadcast after each exploration phase (Φ).
struct SicLeaderInfo {
  std::vector<ArmIndex> accept;   // ascending
  std::vector<ArmIndex> reject;   // ascending
  std::optional<ArmIndex> least_favored;
  CapacityBounds bounds;

  bool operator==(const SicLeaderInfo&) const = default;
};

/// Per-player view that every active player derives identically (Ψ).
struct SicPlayerInfo {
  std::vector<ArmIndex> active_arms;  // ascending
  int active_players = 0;             // M_t
  std::vector<int> allocation;        // b, aligned with active_arms
  int phase = 1;                      // p
  std::optional<ArmIndex> exploit_arm;

  bool operator==(const SicPlayerInfo&) const = default;
};

/// Rank-assignment arm (0-based) for external rank k in 1..K-1 at step s in
/// 1..2K-2.
ArmIndex rank_assign_arm(int external_rank, int step, std::size_t num_arms);

/// IE allocation b: one per active arm plus the surplus M_t - K_t handed out
/// arm by arm up to m^l. Throws ProtocolError if the surplus does not fit.
std::vector<int> sic_allocation(const std::vector<ArmIndex>& active, int active_players,
                                const CapacityBounds& bounds);

/// Arm for 1-based rank at 0-based IE offset s. Ranks up to K_t rotate over
/// the active arms ((rank + s) mod K_t, 0-based position); higher ranks sit
/// on the arm whose prefix of (m^l - 1) first reaches rank - K_t.
ArmIndex sic_ie_arm(int rank, std::int64_t s, const SicPlayerInfo& info,
                    const CapacityBounds& bounds);

/// Arms still needing united exploration.
std::vector<ArmIndex> sic_united_arms(const SicPlayerInfo& info, const CapacityBounds& bounds);

/// Bits per CommBack cell: p + 1 + ceil(log2 M).
int commback_width(int phase, int num_players);

/// Bits per cell for the bound-delta steps of CommForth.
int commforth_bound_bits(int num_players);

struct SicAccRejResult {
  SicLeaderInfo info;
  int bound_crossings = 0;
};

/// Refresh bounds on active arms, then build the accept, reject and
/// least-favored sets.
SicAccRejResult sic_acc_rej(const PlayerStats& stats, const SicPlayerInfo& psi,
                            const CapacityBounds& bounds, double delta, std::int64_t horizon,
                            int num_players);

/// Apply Φ for the player with 1-based `rank`. Returns the next Ψ.
SicPlayerInfo sic_update(int rank, const SicLeaderInfo& phi, const SicPlayerInfo& psi);

/// CommForth step condition (1 reject, 2 accept, 3 least favored) for the
/// arm at active position kpos; for steps 4/5 returns the bound delta.
int sic_forth_value(int step, ArmIndex arm, const SicLeaderInfo& next,
                    const CapacityBounds& pre);

/// Follower-side reconstruction of Φ from the per-cell values it decoded.
/// `values[s-1][kpos]` holds what was read at step s for the arm at kpos.
SicLeaderInfo sic_forth_decode(const std::vector<std::vector<int>>& values,
                               const SicPlayerInfo& psi, const CapacityBounds& pre,
                               int num_players);

struct SicOptions {
  double delta = 0.0;  // <= 0 means 2/T
};

/// Mid-run starting point at the top of an exploration phase.
struct SicResume {
  int rank = 1;
  int num_players = 1;
  SicPlayerInfo psi;
  CapacityBounds bounds;
};

/// SIC-SDA: only the shared/not-shared bit is ever read, so the same
/// policy also runs under count feedback (the SIC-SDI variant).
class SicSdaPolicy final : public Policy {
 public:
  explicit SicSdaPolicy(const PlayerContext& ctx, SicOptions opts = {});
  SicSdaPolicy(const PlayerContext& ctx, const SicResume& resume, SicOptions opts = {});

  ArmIndex next_action(Slot t) override;
  void observe(const Observation& obs) override;
  PhaseTag phase() const override;

  enum class Stage { kOrtho, kRankAssign, kIE, kUE, kCommBack, kCommForth, kExploit };

  Stage stage() const { return stage_; }
  std::int64_t stage_position() const { return pos_; }
  int rank() const { return rank_; }
  int external_rank() const { return ext_rank_; }
  int num_players() const { return m_; }
  bool is_leader() const { return rank_ == 1; }
  const SicPlayerInfo& player_info() const { return psi_; }
  const CapacityBounds& bounds() const { return bounds_; }
  const PlayerStats& stats() const { return stats_; }
  const std::vector<std::int64_t>& phase_sums() const { return phase_sum_; }
  const std::optional<SicLeaderInfo>& last_leader_info() const { return last_phi_; }
  /// Test hook: what follower ranks reported in the last CommBack.
  const std::vector<std::vector<std::int64_t>>& received_values() const { return received_; }
  int bound_crossings() const { return crossings_; }

  /// Test hook: overwrite the per-phase sums a follower will send next.
  void set_phase_sums(std::vector<std::int64_t> sums) { phase_sum_ = std::move(sums); }
  /// Test hook: the leader sends this Φ instead of running AccRej.
  void force_leader_info(SicLeaderInfo phi) { forced_phi_ = std::move(phi); }

 private:
  void finish_rank_assign();
  void start_phase();
  void after_explore();
  void start_commforth();
  void finish_phase();

  std::size_t k_;
  std::int64_t horizon_;
  double delta_;
  std::uint64_t ortho_seed_;

  Stage stage_ = Stage::kOrtho;
  std::unique_ptr<Orthogonalizer> ortho_;
  int ext_rank_ = 0;
  int ra_before_ = 0;  // flags in the first 2k rank-assignment slots
  int ra_total_ = 0;
  int rank_ = 0;
  int m_ = 0;

  SicPlayerInfo psi_;
  CapacityBounds bounds_;
  std::vector<ArmIndex> united_;
  std::int64_t pos_ = 0;
  std::int64_t stage_len_ = 0;
  ArmIndex last_arm_ = 0;

  std::vector<std::int64_t> phase_sum_;  // raw IE reward per arm this phase

  // CommBack layout.
  int width_ = 0;
  int senders_ = 0;
  std::int64_t decoded_ = 0;
  std::vector<std::vector<std::int64_t>> received_;

  // CommForth layout and decoding.
  int bound_bits_ = 0;
  std::vector<std::int64_t> step_start_;  // slot offsets of steps 1..5, plus end
  std::vector<std::vector<int>> forth_values_;
  SicLeaderInfo phi_;
  std::optional<SicLeaderInfo> forced_phi_;
  std::optional<SicLeaderInfo> last_phi_;

  PlayerStats stats_;  // leader only
  int crossings_ = 0;
};

}  // namespace mmab
