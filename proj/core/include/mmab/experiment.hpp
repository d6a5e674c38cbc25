#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mmab/engine.hpp"
#include "mmab/scenario.hpp"

namespace mmab {

/// A runnable entry: a name, an optional fixed feedback mode and a way to
/// build the factory for a concrete instance.
struct NamedFactory {
  std::string name;
  std::optional<Feedback> feedback;
  std::function<PolicyFactory(const EnvSpec&)> make;
};

/// Entry for a built-in algorithm name; throws ConfigError if unknown.
NamedFactory builtin_entry(const std::string& name, double delta);

struct RunRecord {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<double> regret;  // aligned with the checkpoints
};

struct CheckpointStat {
  Slot checkpoint = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single run
  int runs = 0;
};

struct AlgorithmSummary {
  std::string algorithm;
  std::vector<CheckpointStat> points;
};

struct ExperimentResult {
  Scenario scenario;             // as run, with checkpoints filled in
  std::vector<RunRecord> runs;   // algorithm-major, then seed order
  std::vector<AlgorithmSummary> summary;
};

/// Instance for one (entry, seed) pair.
EnvSpec instance_for(const Scenario& s, const NamedFactory& entry, std::uint64_t seed);

/// Runs every (entry, seed) pair on `jobs` worker threads. `on_done` is
/// called once per finished run, serialized.
ExperimentResult run_experiment(const Scenario& s, const std::vector<NamedFactory>& entries,
                                int jobs = 1,
                                const std::function<void(const RunRecord&)>& on_done = {});

/// Same, with the scenario's own algorithm list.
ExperimentResult run_experiment(const Scenario& s, int jobs = 1,
                                const std::function<void(const RunRecord&)>& on_done = {});

std::vector<AlgorithmSummary> aggregate(const std::vector<RunRecord>& runs,
                                        const std::vector<std::string>& algorithms,
                                        const std::vector<Slot>& checkpoints);

std::string raw_csv(const ExperimentResult& r);
std::string summary_json(const ExperimentResult& r);

/// Writes raw.csv, summary.json and scenario.resolved.json into `dir`.
void emit_outputs(const ExperimentResult& r, const std::filesystem::path& dir);

/// Shortest round-trip decimal text for a double.
std::string format_double(double v);

}  // namespace mmab
