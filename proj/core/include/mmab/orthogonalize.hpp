#pragma once

#include <cstdint>

#include "mmab/rng.hpp"
#include "mmab/types.hpp"

namespace mmab {

/// Musical-chairs rank assignment onto arms 0..N-1, with arm N as the
/// waiting arm. Rounds last N+1 slots:
///   offset 0    unranked players pick a uniform arm and claim it if alone;
///               ranked players sit on their own arm;
///   offset r    ranked player r moves to arm N, everyone else stays
///               (unranked players wait on arm N).
/// A round with no sharing in offsets 1..N ends the protocol. Only the
/// shared/not-shared bit is used, so it works under both feedback modes.
class Orthogonalizer {
 public:
  Orthogonalizer(int num_ranks, std::uint64_t seed);

  ArmIndex next_action();
  void observe(bool shared);

  bool done() const { return done_; }
  /// 1-based rank once done() (0 while unranked).
  int rank() const { return rank_; }
  std::int64_t slots_used() const { return slots_; }

 private:
  int n_;
  Rng rng_;
  int rank_ = 0;
  int offset_ = 0;  // position inside the current round
  ArmIndex pending_ = 0;
  bool saw_sharing_ = false;
  bool done_ = false;
  std::int64_t slots_ = 0;
};

}  // namespace mmab
