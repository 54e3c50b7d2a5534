#include <benchmark/benchmark.h>

#include <random>

#include "sos/program.hpp"

namespace {

Eigen::MatrixXd gaussian_samples(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::MatrixXd X(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) X(i, j) = N(rng);
  return X;
}

void BM_BuildProgram(benchmark::State& state) {
  Eigen::MatrixXd X =
      gaussian_samples(static_cast<int>(state.range(0)), 2, 1);
  for (auto _ : state) {
    sos::StructuredSubsetProgram prog = sos::build_program(
        X, 0.5, 4, 1e-3,
        sos::StructuredSubsetProgram::Variant::kGaussianWarmup);
    benchmark::DoNotOptimize(prog);
  }
}
BENCHMARK(BM_BuildProgram)->Arg(12)->Arg(24)->Arg(40)->Unit(
    benchmark::kMillisecond);

void BM_LowerToSdp(benchmark::State& state) {
  Eigen::MatrixXd X =
      gaussian_samples(static_cast<int>(state.range(0)), 2, 1);
  sos::StructuredSubsetProgram prog = sos::build_program(
      X, 0.5, 4, 1e-3, sos::StructuredSubsetProgram::Variant::kGaussianWarmup);
  for (auto _ : state) {
    sos::SdpLowering lowering =
        sos::build_sdp(prog, sos::default_pe_degree(prog));
    benchmark::DoNotOptimize(lowering);
  }
}
BENCHMARK(BM_LowerToSdp)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

}  // namespace
