#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace mmab {

// Stream identifiers mixed into the master seed. Values are part of the
// reproducibility contract: changing them changes every trace.
enum class SeedStream : std::uint64_t {
  kArmReward = 0x41524d52ULL,    // "ARMR"
  kPlayer = 0x504c4159ULL,       // "PLAY"
  kScenario = 0x5343454eULL,     // "SCEN"
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stable child seed for (master, stream, index).
inline constexpr std::uint64_t derive_seed(std::uint64_t master, SeedStream stream,
                                           std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master ^ static_cast<std::uint64_t>(stream)) + index);
}

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by rejection; n must be positive.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return static_cast<std::size_t>(draw % bound);
}

}  // namespace mmab
