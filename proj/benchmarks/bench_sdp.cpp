#include <benchmark/benchmark.h>

#include "sos/sdp.hpp"
#include "sos/selftest.hpp"

namespace {

void BM_SdpSolve(benchmark::State& state) {
  sos::GeneratedSdp g = sos::make_random_feasible_sdp(
      17, static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    sos::SdpSolution s = sos::solve(g.problem);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_SdpSolve)->Args({10, 20})->Args({20, 60})->Args({30, 100})
    ->Unit(benchmark::kMillisecond);

void BM_SdpMinFrobenius(benchmark::State& state) {
  sos::SdpProblem p;
  int n = static_cast<int>(state.range(0));
  p.block_dims = {n};
  p.mode = sos::SdpProblem::Mode::kFeasibility;
  for (int i = 0; i < n; ++i)
    p.add_constraint({{0, i, i, 1.0}}, 1.0 + 0.1 * i);
  for (auto _ : state) {
    sos::SdpSolution s = sos::solve_min_frobenius(p, 0);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_SdpMinFrobenius)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
