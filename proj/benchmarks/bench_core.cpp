#include <benchmark/benchmark.h>

#include "mmab/algorithms.hpp"
#include "mmab/experiment.hpp"
#include "mmab/model.hpp"
#include "mmab/orthogonalize.hpp"
#include "mmab/stats.hpp"

namespace {

using namespace mmab;

void BM_KlucbIndex(benchmark::State& st) {
  double mu = 0.1;
  for (auto _ : st) {
    benchmark::DoNotOptimize(klucb_index(mu, 500, 100000));
    mu = mu > 0.9 ? 0.1 : mu + 0.013;
  }
}
BENCHMARK(BM_KlucbIndex);

void BM_Oracle(benchmark::State& st) {
  const auto s = *find_preset("5g-4g");
  for (auto _ : st) benchmark::DoNotOptimize(oracle(s.means, s.capacities, s.num_players));
}
BENCHMARK(BM_Oracle);

void BM_Orthogonalize(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  std::uint64_t seed = 1;
  for (auto _ : st) {
    std::vector<Orthogonalizer> ps;
    for (int i = 0; i < n; ++i) ps.emplace_back(n, seed * 1000 + i);
    ++seed;
    bool all = false;
    while (!all) {
      std::vector<ArmIndex> a(n);
      for (int i = 0; i < n; ++i) a[i] = ps[i].next_action();
      all = true;
      for (int i = 0; i < n; ++i) {
        int c = 0;
        for (int j = 0; j < n; ++j) c += a[j] == a[i];
        ps[i].observe(c > 1);
        all = all && ps[i].done();
      }
    }
  }
}
BENCHMARK(BM_Orthogonalize)->Arg(6)->Arg(18);

// Whole runs over a short horizon, per algorithm.
void BM_Run(benchmark::State& st) {
  const auto algo = static_cast<Algorithm>(st.range(0));
  auto s = *find_preset("synthetic-d0.025");
  s.horizon = 20000;
  const auto entry = builtin_entry(algorithm_name(algo), 0.0);
  const EnvSpec spec = instance_for(s, entry, 1);
  for (auto _ : st) benchmark::DoNotOptimize(run(entry.make(spec), spec).final_regret());
  st.SetLabel(algorithm_name(algo));
  st.SetItemsProcessed(st.iterations() * s.horizon);
}
BENCHMARK(BM_Run)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
