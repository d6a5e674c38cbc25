#pragma once

#include <cstddef>
#include <cstdint>

namespace mmab {

/// Zero-based arm index. Algorithm listings number arms from 1; every
/// interface in this library uses 0-based indices instead.
using ArmIndex = std::size_t;

/// One-based slot counter, 1..horizon.
using Slot = std::int64_t;

/// One-based player rank produced by the initialization protocols
/// (rank 1 is the leader).
using Rank = int;

enum class Feedback {
  kSharingInfo,       // SDI: co-located players observe the count a_k
  kSharingAwareness,  // SDA: co-located players observe only 1{a_k > 1}
};

inline const char* to_string(Feedback f) {
  return f == Feedback::kSharingInfo ? "sdi" : "sda";
}

/// Coarse role a policy is in during a slot; recorded in traces.
enum class PhaseTag : std::uint8_t {
  kInit = 0,
  kExplore = 1,
  kComm = 2,
  kExploit = 3,
};

inline constexpr std::size_t kPhaseTagCount = 4;

}  // namespace mmab
