#include "mmab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mmab/algorithms.hpp"
#include "mmab/errors.hpp"
#include "mmab/rng.hpp"

namespace mmab {

namespace {

using nlohmann::json;

Scenario synthetic(double delta_gap, const std::string& label) {
  Scenario s;
  s.name = "synthetic-d" + label;
  s.num_players = 6;
  s.horizon = 100000;
  for (int i = 0; i < 9; ++i) s.means.push_back(0.9 - delta_gap * i);
  s.permute_means = true;
  s.capacities = {3, 2, 4, 2, 1, 5, 2, 1, 3};
  s.feedback = Feedback::kSharingInfo;
  s.algorithms = {"dpe-sdi", "sic-sda", "sic-sdi", "highest-reward", "idlest-arm"};
  s.seeds = seed_range(20);
  return s;
}

Scenario edge_computing() {
  Scenario s;
  s.name = "edge-computing";
  s.num_players = 6;
  s.horizon = 100000;
  const double ghz[] = {1.5, 2.1, 1.2, 2.5, 2.0, 1.3, 2.6};
  for (double g : ghz) s.means.push_back(g / 3.0);
  s.capacities = {3, 2, 4, 2, 1, 2, 3};
  s.feedback = Feedback::kSharingInfo;
  s.algorithms = {"dpe-sdi", "highest-reward", "idlest-arm"};
  s.seeds = seed_range(20);
  return s;
}

Scenario five_g() {
  Scenario s;
  s.name = "5g-4g";
  s.num_players = 18;
  s.horizon = 100000;
  const double rtt[] = {1.2, 1.1, 4.2, 4.0, 4.5, 3.5, 5.0, 4.2, 5.5, 3.9,
                        4.8, 5.5, 3.7, 4.7, 3.2, 5.1, 4.4, 5.3, 4.9, 4.1};
  const double thr[] = {9.2, 8.1, 1.2, 1.2, 1.4, 1.1, 1.3, 1.2, 1.1, 1.4,
                        1.0, 1.1, 1.2, 1.0, 1.3, 1.2, 1.0, 1.1, 1.3, 1.2};
  for (double r : rtt) s.means.push_back(1.0 / r);
  for (double t : thr)
    s.capacities.push_back(std::clamp(static_cast<int>(std::lround(t)), 1, s.num_players));
  s.feedback = Feedback::kSharingAwareness;
  s.algorithms = {"sic-sda", "highest-reward", "idlest-arm"};
  s.seeds = seed_range(20);
  return s;
}

Feedback parse_feedback(const std::string& f) {
  if (f == "sdi") return Feedback::kSharingInfo;
  if (f == "sda") return Feedback::kSharingAwareness;
  throw ConfigError("feedback must be \"sdi\" or \"sda\", got \"" + f + "\"");
}

template <class T>
T get_or_throw(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("scenario: missing key \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: bad value for \"") + key + "\": " + e.what());
  }
}

}  // namespace

std::vector<Scenario> preset_scenarios() {
  return {synthetic(0.001, "0.001"), synthetic(0.012, "0.012"), synthetic(0.025, "0.025"),
          synthetic(0.037, "0.037"), edge_computing(),           five_g()};
}

std::optional<Scenario> find_preset(const std::string& name) {
  for (auto& s : preset_scenarios())
    if (s.name == name) return s;
  return std::nullopt;
}

std::vector<Slot> default_checkpoints(std::int64_t horizon) {
  std::set<Slot> pts;
  const double lt = std::log(static_cast<double>(horizon));
  for (int k = 1; k <= 20; ++k) {
    const auto v = static_cast<Slot>(std::llround(std::exp(lt * k / 20.0)));
    pts.insert(std::clamp<Slot>(v, 1, horizon));
  }
  pts.insert(horizon);
  return {pts.begin(), pts.end()};
}

std::vector<std::uint64_t> seed_range(std::size_t n) {
  std::vector<std::uint64_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i + 1;
  return out;
}

std::vector<double> means_for_seed(const Scenario& s, std::uint64_t seed) {
  std::vector<double> m = s.means;
  if (!s.permute_means) return m;
  Rng rng(derive_seed(seed, SeedStream::kScenario, 0));
  for (std::size_t i = m.size(); i > 1; --i) std::swap(m[i - 1], m[uniform_index(rng, i)]);
  return m;
}

void validate_scenario(const Scenario& s) {
  auto fail = [&](const std::string& msg) { throw ConfigError("scenario \"" + s.name + "\": " + msg); };
  if (s.num_players < 1) fail("num_players must be >= 1");
  if (s.horizon < 1) fail("horizon must be >= 1");
  if (s.means.empty()) fail("no arms");
  if (s.means.size() != s.capacities.size()) fail("means and capacities differ in length");
  long long total = 0;
  for (std::size_t k = 0; k < s.means.size(); ++k) {
    if (!(s.means[k] >= 0.0 && s.means[k] <= 1.0)) fail("mean of arm " + std::to_string(k) + " outside [0,1]");
    if (s.capacities[k] < 1 || s.capacities[k] > s.num_players)
      fail("capacity of arm " + std::to_string(k) + " outside [1, num_players]");
    total += s.capacities[k];
  }
  if (total < s.num_players) fail("infeasible: sum of capacities < num_players");
  if (static_cast<std::size_t>(s.num_players) >= s.means.size()) fail("needs num_players < number of arms");
  if (s.algorithms.empty()) fail("no algorithms");
  for (const auto& a : s.algorithms)
    if (!parse_algorithm(a)) fail("unknown algorithm \"" + a + "\"");
  if (s.seeds.empty()) fail("no seeds");
  Slot prev = 0;
  for (Slot c : s.checkpoints) {
    if (c <= prev || c > s.horizon) fail("checkpoints must be strictly increasing within [1, horizon]");
    prev = c;
  }
  if (s.delta < 0.0 || s.delta >= 1.0) fail("delta must be in (0,1), or 0 for the default");
}

std::vector<Slot> effective_checkpoints(const Scenario& s) {
  return s.checkpoints.empty() ? default_checkpoints(s.horizon) : s.checkpoints;
}

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("scenario: top level must be an object");
  static const std::set<std::string> known = {
      "name",     "num_players", "horizon",     "means", "permute_means", "capacities",
      "feedback", "algorithms",  "seeds",       "checkpoints", "delta",   "per_seed_means"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("scenario: unknown key \"" + key + "\"");

  Scenario s;
  s.name = j.value("name", std::string("custom"));
  s.num_players = get_or_throw<int>(j, "num_players");
  s.horizon = get_or_throw<std::int64_t>(j, "horizon");
  s.means = get_or_throw<std::vector<double>>(j, "means");
  s.permute_means = j.value("permute_means", false);
  s.capacities = get_or_throw<std::vector<int>>(j, "capacities");
  s.feedback = parse_feedback(j.value("feedback", std::string("sdi")));
  s.algorithms = get_or_throw<std::vector<std::string>>(j, "algorithms");
  const json& seeds = j.contains("seeds") ? j.at("seeds") : json(20);
  if (seeds.is_number_integer()) {
    const auto n = seeds.get<std::int64_t>();
    if (n < 1) throw ConfigError("scenario: seeds count must be >= 1");
    s.seeds = seed_range(static_cast<std::size_t>(n));
  } else {
    s.seeds = get_or_throw<std::vector<std::uint64_t>>(j, "seeds");
  }
  if (j.contains("checkpoints")) s.checkpoints = get_or_throw<std::vector<Slot>>(j, "checkpoints");
  if (j.contains("delta")) s.delta = get_or_throw<double>(j, "delta");
  validate_scenario(s);
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

std::string scenario_to_json(const Scenario& s, bool resolved) {
  json j;
  j["name"] = s.name;
  j["num_players"] = s.num_players;
  j["horizon"] = s.horizon;
  j["means"] = s.means;
  j["permute_means"] = s.permute_means;
  j["capacities"] = s.capacities;
  j["feedback"] = to_string(s.feedback);
  j["algorithms"] = s.algorithms;
  j["seeds"] = s.seeds;
  if (resolved) {
    j["checkpoints"] = effective_checkpoints(s);
    j["delta"] = s.delta > 0.0 ? s.delta : 2.0 / static_cast<double>(std::max<std::int64_t>(s.horizon, 3));
    json per = json::object();
    for (auto seed : s.seeds) per[std::to_string(seed)] = means_for_seed(s, seed);
    j["per_seed_means"] = per;
  } else {
    if (!s.checkpoints.empty()) j["checkpoints"] = s.checkpoints;
    if (s.delta > 0.0) j["delta"] = s.delta;
  }
  return j.dump(2) + "\n";
}

Scenario resolve_scenario(const std::string& name_or_path) {
  if (auto p = find_preset(name_or_path)) return *p;
  if (std::filesystem::exists(name_or_path)) return load_scenario_file(name_or_path);
  throw ConfigError("no preset or file named \"" + name_or_path + "\"");
}

}  // namespace mmab
