// Serial reference vs OpenMP kernels. Argument is the population size.
#include <benchmark/benchmark.h>

#include <map>

#include "welfare/data_io.hpp"
#include "welfare/kernels.hpp"
#include "welfare/svm.hpp"
#include "welfare/welfare.hpp"

using namespace welfare;

namespace {

struct Fixture {
  Dataset data;
  LinearClassifier model;
  std::vector<double> margins;
  std::vector<double> incomes;
};

const Fixture& fixture(std::size_t n) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    GeneratorConfig g = GeneratorConfig::defaults();
    g.groups[0].n = n / 2;
    g.groups[1].n = n - n / 2;
    Dataset data = generate_population(g);
    LinearClassifier model{g.true_theta, g.true_b};
    auto h = kernels::margins(model, data, Exec::Serial);
    auto m = data.incomes();
    it = cache.emplace(n, Fixture{std::move(data), std::move(model), std::move(h), std::move(m)}).first;
  }
  return it->second;
}

template <Exec E>
void BM_Margins(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::margins(f.model, f.data, E));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Exec E>
void BM_MarginalGains(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  const WeightFunction wf;
  for (auto _ : state) benchmark::DoNotOptimize(marginal_gains(wf, f.margins, f.incomes, E));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Exec E>
void BM_HingeObjective(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hinge_objective(f.model, f.data, 1e-3, E));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Margins<Exec::Serial>)->RangeMultiplier(10)->Range(1000, 1000000);
BENCHMARK(BM_Margins<Exec::Parallel>)->RangeMultiplier(10)->Range(1000, 1000000);
BENCHMARK(BM_MarginalGains<Exec::Serial>)->RangeMultiplier(10)->Range(1000, 1000000);
BENCHMARK(BM_MarginalGains<Exec::Parallel>)->RangeMultiplier(10)->Range(1000, 1000000);
BENCHMARK(BM_HingeObjective<Exec::Serial>)->RangeMultiplier(10)->Range(1000, 1000000);
BENCHMARK(BM_HingeObjective<Exec::Parallel>)->RangeMultiplier(10)->Range(1000, 1000000);

BENCHMARK_MAIN();
