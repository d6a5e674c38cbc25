#include "mmab/experiment.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mmab/algorithms.hpp"
#include "mmab/errors.hpp"

namespace mmab {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

NamedFactory builtin_entry(const std::string& name, double delta) {
  const auto algo = parse_algorithm(name);
  if (!algo) throw ConfigError("unknown algorithm \"" + name + "\"");
  PolicyFactory f = make_factory(*algo, delta);
  return NamedFactory{name, pinned_feedback(*algo), [f](const EnvSpec&) { return f; }};
}

EnvSpec instance_for(const Scenario& s, const NamedFactory& entry, std::uint64_t seed) {
  EnvSpec spec;
  spec.means = means_for_seed(s, seed);
  spec.capacities = s.capacities;
  spec.num_players = s.num_players;
  spec.horizon = s.horizon;
  spec.feedback = entry.feedback.value_or(s.feedback);
  spec.seed = seed;
  return spec;
}

std::vector<AlgorithmSummary> aggregate(const std::vector<RunRecord>& runs,
                                        const std::vector<std::string>& algorithms,
                                        const std::vector<Slot>& checkpoints) {
  std::vector<AlgorithmSummary> out;
  for (const auto& name : algorithms) {
    AlgorithmSummary s{name, {}};
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      CheckpointStat st;
      st.checkpoint = checkpoints[c];
      double sum = 0.0;
      for (const auto& r : runs)
        if (r.algorithm == name) {
          sum += r.regret[c];
          ++st.runs;
        }
      if (st.runs > 0) st.mean = sum / st.runs;
      if (st.runs > 1) {
        double ss = 0.0;
        for (const auto& r : runs)
          if (r.algorithm == name) ss += (r.regret[c] - st.mean) * (r.regret[c] - st.mean);
        st.std = std::sqrt(ss / (st.runs - 1));
      }
      s.points.push_back(st);
    }
    out.push_back(std::move(s));
  }
  return out;
}

ExperimentResult run_experiment(const Scenario& s, const std::vector<NamedFactory>& entries,
                                int jobs, const std::function<void(const RunRecord&)>& on_done) {
  ExperimentResult result;
  result.scenario = s;
  result.scenario.checkpoints = effective_checkpoints(s);
  const auto& cps = result.scenario.checkpoints;
  for (Slot c : cps)
    if (c < 1 || c > s.horizon) throw ConfigError("checkpoint outside [1, horizon]");

  // Fail on bad instances before any run starts.
  for (const auto& e : entries)
    for (auto seed : s.seeds) {
      try {
        instance_for(s, e, seed).validate();
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("scenario \"") + s.name + "\": " + ex.what());
      }
    }

  const std::size_t n = entries.size() * s.seeds.size();
  result.runs.resize(n);
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      const auto& entry = entries[i / s.seeds.size()];
      const auto seed = s.seeds[i % s.seeds.size()];
      try {
        const EnvSpec spec = instance_for(s, entry, seed);
        const RunTrace trace = run(entry.make(spec), spec);
        RunRecord rec{entry.name, seed, {}};
        rec.regret.reserve(cps.size());
        for (Slot c : cps) rec.regret.push_back(trace.regret_at(c));
        std::lock_guard<std::mutex> lock(mu);
        result.runs[i] = std::move(rec);
        if (on_done) on_done(result.runs[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };

  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<std::string> names;
  for (const auto& e : entries) names.push_back(e.name);
  result.summary = aggregate(result.runs, names, cps);
  return result;
}

ExperimentResult run_experiment(const Scenario& s, int jobs,
                                const std::function<void(const RunRecord&)>& on_done) {
  validate_scenario(s);
  std::vector<NamedFactory> entries;
  for (const auto& a : s.algorithms) entries.push_back(builtin_entry(a, s.delta));
  return run_experiment(s, entries, jobs, on_done);
}

std::string raw_csv(const ExperimentResult& r) {
  std::string out = "algorithm,seed,checkpoint,cum_regret\n";
  for (const auto& run : r.runs)
    for (std::size_t c = 0; c < run.regret.size(); ++c) {
      out += run.algorithm;
      out += ',';
      out += std::to_string(run.seed);
      out += ',';
      out += std::to_string(r.scenario.checkpoints[c]);
      out += ',';
      out += format_double(run.regret[c]);
      out += '\n';
    }
  return out;
}

std::string summary_json(const ExperimentResult& r) {
  nlohmann::ordered_json j;
  j["scenario"] = r.scenario.name;
  j["horizon"] = r.scenario.horizon;
  j["seeds"] = r.scenario.seeds.size();
  auto& algos = j["algorithms"];
  algos = nlohmann::ordered_json::array();
  for (const auto& s : r.summary) {
    nlohmann::ordered_json a;
    a["algorithm"] = s.algorithm;
    auto& pts = a["checkpoints"];
    pts = nlohmann::ordered_json::array();
    for (const auto& p : s.points)
      pts.push_back({{"checkpoint", p.checkpoint}, {"mean", p.mean}, {"std", p.std}, {"runs", p.runs}});
    algos.push_back(std::move(a));
  }
  return j.dump(2) + "\n";
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("error writing " + p.string());
}

}  // namespace

void emit_outputs(const ExperimentResult& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "raw.csv", raw_csv(r));
  write_file(dir / "summary.json", summary_json(r));
  write_file(dir / "scenario.resolved.json", scenario_to_json(r.scenario, true));
}

}  // namespace mmab
