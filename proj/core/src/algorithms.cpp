#include "mmab/algorithms.hpp"

#include <memory>

#include "mmab/baselines.hpp"
#include "mmab/dpe_sdi.hpp"
#include "mmab/sic_sda.hpp"

namespace mmab {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kDpeSdi: return "dpe-sdi";
    case Algorithm::kSicSda: return "sic-sda";
    case Algorithm::kSicSdi: return "sic-sdi";
    case Algorithm::kHighestReward: return "highest-reward";
    case Algorithm::kIdlestArm: return "idlest-arm";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (Algorithm a : all_algorithms())
    if (name == algorithm_name(a)) return a;
  return std::nullopt;
}

std::vector<Algorithm> all_algorithms() {
  return {Algorithm::kDpeSdi, Algorithm::kSicSda, Algorithm::kSicSdi, Algorithm::kHighestReward,
          Algorithm::kIdlestArm};
}

std::optional<Feedback> pinned_feedback(Algorithm a) {
  switch (a) {
    case Algorithm::kDpeSdi:
    case Algorithm::kSicSdi:
      return Feedback::kSharingInfo;
    case Algorithm::kSicSda:
      return Feedback::kSharingAwareness;
    default:
      return std::nullopt;
  }
}

PolicyFactory make_factory(Algorithm a, double delta) {
  switch (a) {
    case Algorithm::kDpeSdi:
      return [delta](const PlayerContext& ctx) -> std::unique_ptr<Policy> {
        return std::make_unique<DpeSdiPolicy>(ctx, DpeOptions{delta});
      };
    case Algorithm::kSicSda:
    case Algorithm::kSicSdi:
      return [delta](const PlayerContext& ctx) -> std::unique_ptr<Policy> {
        return std::make_unique<SicSdaPolicy>(ctx, SicOptions{delta});
      };
    case Algorithm::kHighestReward:
      return [](const PlayerContext& ctx) -> std::unique_ptr<Policy> {
        return std::make_unique<HighestRewardPolicy>(ctx);
      };
    case Algorithm::kIdlestArm:
      return [](const PlayerContext& ctx) -> std::unique_ptr<Policy> {
        return std::make_unique<IdlestArmPolicy>(ctx);
      };
  }
  return {};
}

}  // namespace mmab
