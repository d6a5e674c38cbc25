// mmab: run multi-player bandit experiments from presets or scenario files.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmab/algorithms.hpp"
#include "mmab/errors.hpp"
#include "mmab/experiment.hpp"
#include "mmab/scenario.hpp"

namespace {

using namespace mmab;

// "N" is a count (seeds 1..N); "a,b,c" is an explicit list. A single explicit
// seed can be written "7,".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  if (text.find(',') == std::string::npos) {
    std::size_t used = 0;
    long long n = -1;
    try {
      n = std::stoll(text, &used);
    } catch (const std::exception&) {
    }
    if (used != text.size() || n < 1) throw ConfigError("--seeds: expected a count >= 1 or a comma list");
    return seed_range(static_cast<std::size_t>(n));
  }
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, end - pos);
    if (!item.empty()) {
      std::size_t used = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != item.size() || item.front() == '-') throw ConfigError("--seeds: bad seed \"" + item + "\"");
      out.push_back(v);
    }
    pos = end + 1;
  }
  if (out.empty()) throw ConfigError("--seeds: empty list");
  return out;
}

struct RunArgs {
  std::string scenario;
  std::string algo;
  std::int64_t horizon = 0;
  std::string seeds;
  double delta = 0.0;
  std::string feedback;
  std::string out = "results";
  int jobs = 1;
};

int do_run(const RunArgs& a) {
  Scenario s = resolve_scenario(a.scenario);
  if (a.horizon > 0) {
    s.horizon = a.horizon;
    std::vector<Slot> kept;
    for (Slot c : s.checkpoints)
      if (c <= s.horizon) kept.push_back(c);
    s.checkpoints = kept;
  }
  if (!a.algo.empty() && a.algo != "all") {
    s.algorithms = {a.algo};
  } else if (a.algo == "all") {
    s.algorithms.clear();
    for (Algorithm x : all_algorithms()) s.algorithms.emplace_back(algorithm_name(x));
  }
  if (!a.seeds.empty()) s.seeds = parse_seeds(a.seeds);
  if (a.delta > 0.0) s.delta = a.delta;
  if (!a.feedback.empty()) s.feedback = a.feedback == "sda" ? Feedback::kSharingAwareness : Feedback::kSharingInfo;
  validate_scenario(s);

  const auto result = run_experiment(s, a.jobs, [&](const RunRecord& r) {
    std::fprintf(stderr, "done %s seed=%llu regret=%s\n", r.algorithm.c_str(),
                 static_cast<unsigned long long>(r.seed),
                 format_double(r.regret.empty() ? 0.0 : r.regret.back()).c_str());
  });
  emit_outputs(result, a.out);
  for (const auto& sum : result.summary) {
    const auto& last = sum.points.back();
    std::printf("%-15s T=%lld mean=%.3f std=%.3f runs=%d\n", sum.algorithm.c_str(),
                static_cast<long long>(last.checkpoint), last.mean, last.std, last.runs);
  }
  std::printf("wrote %s\n", a.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-player multi-armed bandits with shareable arms"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Run a scenario and write raw.csv, summary.json, scenario.resolved.json");
  run->add_option("--scenario", ra.scenario, "Preset name or scenario file")->required();
  std::vector<std::string> algo_choices{"all"};
  for (Algorithm x : all_algorithms()) algo_choices.emplace_back(algorithm_name(x));
  run->add_option("--algo", ra.algo, "Algorithm, or 'all' (default: the scenario's list)")
      ->check(CLI::IsMember(algo_choices));
  run->add_option("--horizon", ra.horizon, "Horizon T")->check(CLI::PositiveNumber);
  run->add_option("--seeds", ra.seeds, "Seed count N or comma list");
  run->add_option("--delta", ra.delta, "Confidence level (default 2/T)")->check(CLI::Range(0.0, 1.0));
  run->add_option("--feedback", ra.feedback, "Feedback for heuristics")->check(CLI::IsMember({"sdi", "sda"}));
  run->add_option("--out", ra.out, "Output directory")->capture_default_str();
  run->add_option("--jobs", ra.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  auto* list = app.add_subcommand("list-scenarios", "List built-in presets");

  std::string vpath;
  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("--scenario", vpath, "Scenario file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(ra);
    if (list->parsed()) {
      for (const auto& s : preset_scenarios()) {
        std::printf("%-16s K=%zu M=%d T=%lld feedback=%s algorithms=", s.name.c_str(), s.means.size(),
                    s.num_players, static_cast<long long>(s.horizon), to_string(s.feedback));
        for (std::size_t i = 0; i < s.algorithms.size(); ++i)
          std::printf("%s%s", i ? "," : "", s.algorithms[i].c_str());
        std::printf("\n");
      }
      return 0;
    }
    if (validate->parsed()) {
      const Scenario s = load_scenario_file(vpath);
      std::printf("ok: %s K=%zu M=%d T=%lld seeds=%zu\n", s.name.c_str(), s.means.size(), s.num_players,
                  static_cast<long long>(s.horizon), s.seeds.size());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
