#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mmab/model.hpp"

namespace mmab {

/// An experiment description: an EnvSpec template plus what to run on it.
struct Scenario {
  std::string name;
  int num_players = 1;
  std::int64_t horizon = 100000;
  std::vector<double> means;
  bool permute_means = false;  // shuffle means per seed
  std::vector<int> capacities;
  Feedback feedback = Feedback::kSharingInfo;
  std::vector<std::string> algorithms;
  std::vector<std::uint64_t> seeds;
  std::vector<Slot> checkpoints;  // empty: default_checkpoints(horizon)
  double delta = 0.0;             // <= 0: 2/T
};

std::vector<Scenario> preset_scenarios();
std::optional<Scenario> find_preset(const std::string& name);

/// 20 log-spaced slots plus T, deduplicated and increasing.
std::vector<Slot> default_checkpoints(std::int64_t horizon);

/// Seeds 1..n.
std::vector<std::uint64_t> seed_range(std::size_t n);

/// Means used for one seed (permuted when the scenario asks for it).
std::vector<double> means_for_seed(const Scenario& s, std::uint64_t seed);

/// Throws ConfigError describing the first problem found.
void validate_scenario(const Scenario& s);

/// Checkpoints to use: the explicit list or the default one.
std::vector<Slot> effective_checkpoints(const Scenario& s);

Scenario scenario_from_json(const std::string& text);
Scenario load_scenario_file(const std::filesystem::path& path);

/// JSON text for the scenario. With `resolved`, checkpoints and delta are
/// made explicit and per-seed means are added for reference.
std::string scenario_to_json(const Scenario& s, bool resolved);

/// A preset name or a path to a scenario file.
Scenario resolve_scenario(const std::string& name_or_path);

}  // namespace mmab
