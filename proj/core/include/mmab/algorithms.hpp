#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmab/engine.hpp"

namespace mmab {

enum class Algorithm { kDpeSdi, kSicSda, kSicSdi, kHighestReward, kIdlestArm };

const char* algorithm_name(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);
std::vector<Algorithm> all_algorithms();

/// Feedback mode an algorithm always runs under, if it is tied to one.
/// The heuristics follow the scenario instead.
std::optional<Feedback> pinned_feedback(Algorithm a);

/// Factory for the algorithm; `delta` <= 0 picks the default 2/T.
PolicyFactory make_factory(Algorithm a, double delta = 0.0);

}  // namespace mmab
