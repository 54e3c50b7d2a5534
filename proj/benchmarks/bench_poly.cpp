#include <benchmark/benchmark.h>

#include <random>

#include "sos/poly.hpp"

namespace {

sos::Poly dense_poly(int nvars, int deg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  sos::Poly p;
  std::vector<int> exp(nvars, 0);
  // all monomials of degree <= deg over nvars variables
  std::function<void(int, int)> rec = [&](int v, int left) {
    if (v == nvars) {
      sos::Monomial m;
      for (int i = 0; i < nvars; ++i)
        if (exp[i] > 0) m = m * sos::Monomial::var(i, exp[i]);
      p = p + sos::Poly(m, coef(rng));
      return;
    }
    for (int e = 0; e <= left; ++e) {
      exp[v] = e;
      rec(v + 1, left - e);
    }
    exp[v] = 0;
  };
  rec(0, deg);
  return p;
}

void BM_PolyMul(benchmark::State& state) {
  int nvars = static_cast<int>(state.range(0));
  sos::Poly p = dense_poly(nvars, 3, 1);
  sos::Poly q = dense_poly(nvars, 3, 2);
  for (auto _ : state) {
    sos::Poly r = p * q;
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_PolyMul)->Arg(3)->Arg(5);

void BM_InnerPower(benchmark::State& state) {
  int d = static_cast<int>(state.range(0));
  sos::PolyVector a, b;
  for (int i = 0; i < d; ++i) {
    a.push_back(sos::Poly(1.0) * 0.5 - sos::Poly::var(i));
    b.push_back(sos::Poly::var(d + i));
  }
  for (auto _ : state) {
    sos::Poly r = sos::inner_power(a, b, 4);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_InnerPower)->Arg(2)->Arg(3);

}  // namespace
