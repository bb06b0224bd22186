// Microbenchmarks for the construction and analysis hot paths.  The
// enumeration benchmarks scale exponentially in the node count (the
// independent-set family grows like phi^n), so the ring sizes here are
// chosen to keep a full run under a few seconds while still separating
// algorithmic regressions from noise.

#include <benchmark/benchmark.h>

#include <vector>

#include "ringhet/dynamics.hpp"
#include "ringhet/graph.hpp"
#include "ringhet/network.hpp"
#include "ringhet/stability.hpp"

namespace {

void BM_IndependentSets(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto g = ringhet::make_ring(n, 1);
  for (auto _ : state) {
    auto sets = ringhet::independent_sets(g);
    benchmark::DoNotOptimize(sets);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_IndependentSets)->Arg(12)->Arg(16)->Arg(20);

void BM_BuildNetwork(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto g = ringhet::make_ring(n, 1);
  for (auto _ : state) {
    auto net = ringhet::build_network(g, 2.0, 3.04);
    benchmark::DoNotOptimize(net);
  }
}
BENCHMARK(BM_BuildNetwork)->Arg(7)->Arg(12)->Arg(16);

void BM_EnumerateCycles(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto net =
      ringhet::build_network(ringhet::make_ring(n, 1), 2.0, 3.04);
  for (auto _ : state) {
    auto cycles = ringhet::enumerate_cycles(net);
    benchmark::DoNotOptimize(cycles);
  }
}
BENCHMARK(BM_EnumerateCycles)->Arg(7)->Arg(9);

void BM_CharPolyRoots(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const auto coeffs = ringhet::char_poly(2, q, 1.7);
  for (auto _ : state) {
    auto rs = ringhet::roots(coeffs);
    benchmark::DoNotOptimize(rs);
  }
}
BENCHMARK(BM_CharPolyRoots)->Arg(6)->Arg(14)->Arg(30);

void BM_PodviginaCheck(benchmark::State& state) {
  const int j = static_cast<int>(state.range(0));
  const auto M = ringhet::transition_matrix_symmetric(j, j, 1.7);
  for (auto _ : state) {
    auto rep = ringhet::podvigina_check(M);
    benchmark::DoNotOptimize(rep);
  }
}
BENCHMARK(BM_PodviginaCheck)->Arg(2)->Arg(5)->Arg(10);

void BM_SimulateSteps(benchmark::State& state) {
  const auto net =
      ringhet::build_network(ringhet::make_ring(5, 1), 2.0, 3.04);
  const auto x0 = ringhet::perturbed_ic(net, net.index_of({1, 3}), 1e-6, 1);
  ringhet::SimParams params;
  params.steps = state.range(0);
  for (auto _ : state) {
    auto series = ringhet::simulate_epochs(net, x0, params);
    benchmark::DoNotOptimize(series);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateSteps)->Arg(10000)->Arg(100000);

void BM_SimulateLogDomainSteps(benchmark::State& state) {
  const auto net =
      ringhet::build_network(ringhet::make_ring(5, 1), 2.0, 3.04);
  const auto x0 = ringhet::perturbed_ic(net, net.index_of({1, 3}), 1e-6, 1);
  ringhet::SimParams params;
  params.steps = state.range(0);
  params.log_domain = true;
  for (auto _ : state) {
    auto series = ringhet::simulate_epochs(net, x0, params);
    benchmark::DoNotOptimize(series);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateLogDomainSteps)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
