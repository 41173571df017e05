#include <benchmark/benchmark.h>

#include "ltunnel/analytic.hpp"
#include "ltunnel/oracle_tdse.hpp"
#include "ltunnel/specfun.hpp"

using namespace ltunnel;

static void BM_Faddeeva(benchmark::State& st) {
  cplx z(3.7, 0.4), acc = 0.0;
  for (auto _ : st) {
    acc += faddeeva(z);
    z += cplx(1e-9, 1e-9);
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_Faddeeva);

static void BM_BesselJ(benchmark::State& st) {
  const int l = static_cast<int>(st.range(0));
  double x = 37.0, acc = 0.0;
  for (auto _ : st) {
    acc += bessel_j(l, x);
    x += 1e-9;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_BesselJ)->Arg(0)->Arg(5)->Arg(40);

static void BM_TransmittedTerm(benchmark::State& st) {
  const PacketSpec pk(-20.0, 10.0, 20.0);
  const auto sc = make_scenario(pk, barrier_from_k0(0.5, 10.0, 0.1), 1.4);
  const int l = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(transmitted_term(l, 2.3 + 0.4 * l, 2.2, sc));
}
BENCHMARK(BM_TransmittedTerm)->Arg(0)->Arg(2)->Unit(benchmark::kMillisecond);

// 0.1 time units on the compare grid
static void BM_CrankNicolson(benchmark::State& st) {
  const PacketSpec pk(-4.0, 10.0, 4.0);
  const auto cfg = oracle_config_for(pk, Barrier(100.0, 0.4), 0.01, 1e-3, {0.1});
  for (auto _ : st) benchmark::DoNotOptimize(evolve(cfg));
}
BENCHMARK(BM_CrankNicolson)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
