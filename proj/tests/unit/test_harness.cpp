#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "mmab/baselines.hpp"
#include "mmab/errors.hpp"
#include "mmab/experiment.hpp"
#include "mmab/scenario.hpp"

using namespace mmab;

namespace {

Scenario tiny() {
  Scenario s;
  s.name = "tiny";
  s.num_players = 2;
  s.horizon = 3000;
  s.means = {0.8, 0.6, 0.4, 0.2};
  s.permute_means = true;
  s.capacities = {1, 2, 1, 1};
  s.algorithms = {"highest-reward", "idlest-arm", "dpe-sdi"};
  s.seeds = {1, 2, 3};
  return s;
}

NamedFactory optimal_entry() {
  return NamedFactory{"optimal", std::nullopt, [](const EnvSpec& spec) {
                        return fixed_profile_factory(oracle(spec).profile);
                      }};
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("mmab_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream b;
  b << in.rdbuf();
  return b.str();
}

}  // namespace

TEST_CASE("presets") {
  const auto syn = find_preset("synthetic-d0.025");
  REQUIRE(syn);
  REQUIRE(syn->means.size() == 9);
  CHECK(syn->means.front() == doctest::Approx(0.90));
  CHECK(syn->means[1] == doctest::Approx(0.875));
  CHECK(syn->means.back() == doctest::Approx(0.70));
  CHECK(syn->capacities == std::vector<int>{3, 2, 4, 2, 1, 5, 2, 1, 3});
  CHECK(syn->num_players == 6);
  CHECK(syn->permute_means);

  const auto edge = find_preset("edge-computing");
  REQUIRE(edge);
  CHECK(edge->means[3] == doctest::Approx(0.8333).epsilon(1e-4));
  CHECK(edge->capacities[3] == 2);
  CHECK(edge->feedback == Feedback::kSharingInfo);

  const auto net = find_preset("5g-4g");
  REQUIRE(net);
  CHECK(net->means.size() == 20);
  CHECK(net->means[0] == doctest::Approx(1 / 1.2));
  CHECK(net->capacities[0] == 9);
  CHECK(net->num_players == 18);
  CHECK(net->feedback == Feedback::kSharingAwareness);

  for (const auto& s : preset_scenarios()) CHECK_NOTHROW(validate_scenario(s));
}

TEST_CASE("per-seed permutation is reproducible") {
  const Scenario s = *find_preset("synthetic-d0.012");
  const auto a = means_for_seed(s, 5);
  CHECK(a == means_for_seed(s, 5));
  auto sorted = a;
  std::sort(sorted.rbegin(), sorted.rend());
  CHECK(sorted == s.means);
  bool differs = false;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) differs |= means_for_seed(s, seed) != a;
  CHECK(differs);
}

TEST_CASE("default checkpoints") {
  const auto c = default_checkpoints(100000);
  CHECK(c.back() == 100000);
  CHECK(c.size() <= 21);
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i] > c[i - 1]);
  CHECK(default_checkpoints(1) == std::vector<Slot>{1});
}

TEST_CASE("optimal dummy has zero regret") {
  Scenario s = tiny();
  s.seeds = {4};
  s.checkpoints = {10, 100, 3000};
  const auto r = run_experiment(s, {optimal_entry()});
  REQUIRE(r.summary.size() == 1);
  for (const auto& p : r.summary[0].points) {
    CHECK(p.mean == 0.0);
    CHECK(p.std == 0.0);
    CHECK(p.runs == 1);
  }
}

TEST_CASE("a repeated seed has zero spread") {
  Scenario s = tiny();
  s.seeds = {7, 7};
  const auto r = run_experiment(s, 1);
  for (const auto& sum : r.summary)
    for (const auto& p : sum.points) {
      CHECK(p.std == 0.0);
      CHECK(p.runs == 2);
    }
}

TEST_CASE("infeasible scenarios fail before running") {
  Scenario s = tiny();
  s.num_players = 6;
  s.capacities = {1, 1, 1, 1};
  CHECK_THROWS_AS(validate_scenario(s), ConfigError);
  int runs = 0;
  CHECK_THROWS_AS(run_experiment(s, {optimal_entry()}, 1, [&](const RunRecord&) { ++runs; }), ConfigError);
  CHECK(runs == 0);
}

TEST_CASE("scenario validation") {
  Scenario s = tiny();
  s.checkpoints = {10, 10};
  CHECK_THROWS_AS(validate_scenario(s), ConfigError);
  s.checkpoints = {10, 5000};
  CHECK_THROWS_AS(validate_scenario(s), ConfigError);
  s = tiny();
  s.algorithms = {"nope"};
  CHECK_THROWS_AS(validate_scenario(s), ConfigError);
}

TEST_CASE("csv output") {
  ExperimentResult empty;
  empty.scenario = tiny();
  CHECK(raw_csv(empty) == "algorithm,seed,checkpoint,cum_regret\n");

  Scenario s = tiny();
  s.seeds = {1};
  s.checkpoints = {10, 20, 30};
  const auto r = run_experiment(s, {optimal_entry()});
  const std::string csv = raw_csv(r);
  CHECK(csv == "algorithm,seed,checkpoint,cum_regret\noptimal,1,10,0\noptimal,1,20,0\noptimal,1,30,0\n");
}

TEST_CASE("property: summary matches a recomputation from the csv") {
  const auto r = run_experiment(tiny(), 2);
  std::istringstream in(raw_csv(r));
  std::string line;
  std::getline(in, line);
  std::map<std::pair<std::string, long long>, std::vector<double>> cells;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string algo, seed, cp, val;
    std::getline(row, algo, ',');
    std::getline(row, seed, ',');
    std::getline(row, cp, ',');
    std::getline(row, val, ',');
    cells[{algo, std::stoll(cp)}].push_back(std::stod(val));
  }
  for (const auto& sum : r.summary)
    for (const auto& p : sum.points) {
      const auto& xs = cells.at({sum.algorithm, p.checkpoint});
      double m = 0;
      for (double x : xs) m += x;
      m /= static_cast<double>(xs.size());
      double ss = 0;
      for (double x : xs) ss += (x - m) * (x - m);
      const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
      CHECK(p.runs == static_cast<int>(xs.size()));
      CHECK(p.mean == doctest::Approx(m).epsilon(1e-12));
      CHECK(p.std == doctest::Approx(sd).epsilon(1e-9));
      CHECK(p.std >= 0.0);
    }
}

TEST_CASE("outputs do not depend on the worker count") {
  const auto a = run_experiment(tiny(), 1);
  const auto b = run_experiment(tiny(), 3);
  CHECK(raw_csv(a) == raw_csv(b));
  CHECK(summary_json(a) == summary_json(b));
}

TEST_CASE("resolved scenario reproduces the run") {
  const auto dir = temp_dir("roundtrip");
  const auto first = run_experiment(tiny(), 1);
  emit_outputs(first, dir);
  CHECK(std::filesystem::exists(dir / "summary.json"));
  const Scenario again = load_scenario_file(dir / "scenario.resolved.json");
  const auto second = run_experiment(again, 1);
  CHECK(raw_csv(second) == slurp(dir / "raw.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("unwritable output path names the path") {
  const auto dir = temp_dir("blocked");
  std::filesystem::create_directories(dir);
  const auto file = dir / "not_a_dir";
  std::ofstream(file) << "x";
  ExperimentResult r;
  r.scenario = tiny();
  try {
    emit_outputs(r, file / "out");
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("not_a_dir") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("scenario files") {
  const std::string good = R"({"name": "f", "num_players": 2, "horizon": 100,
    "means": [0.5, 0.4, 0.3], "capacities": [1, 2, 1], "algorithms": ["dpe-sdi"], "seeds": 3})";
  const auto s = scenario_from_json(good);
  CHECK(s.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(s.feedback == Feedback::kSharingInfo);
  CHECK(scenario_from_json(scenario_to_json(s, false)).seeds == s.seeds);

  CHECK_THROWS_AS(scenario_from_json(R"({"name": "f"})"), ConfigError);
  CHECK_THROWS_AS(scenario_from_json("{not json"), ConfigError);
  std::string extra = good;
  extra.insert(1, "\"colour\": 1, ");
  CHECK_THROWS_AS(scenario_from_json(extra), ConfigError);
  std::string listed = good;
  listed.replace(listed.find("\"seeds\": 3"), 10, "\"seeds\": [9, 4]");
  CHECK(scenario_from_json(listed).seeds == std::vector<std::uint64_t>{9, 4});
  CHECK_THROWS_AS(resolve_scenario("no-such-preset"), ConfigError);
}

TEST_CASE("algorithms with a fixed feedback mode ignore the scenario's") {
  Scenario s = tiny();
  s.feedback = Feedback::kSharingAwareness;
  CHECK(instance_for(s, builtin_entry("dpe-sdi", 0.0), 1).feedback == Feedback::kSharingInfo);
  CHECK(instance_for(s, builtin_entry("sic-sda", 0.0), 1).feedback == Feedback::kSharingAwareness);
  CHECK(instance_for(s, builtin_entry("idlest-arm", 0.0), 1).feedback == Feedback::kSharingAwareness);
  CHECK_THROWS_AS(builtin_entry("ucb", 0.0), ConfigError);
}
