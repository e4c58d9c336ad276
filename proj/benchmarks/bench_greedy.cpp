#include <benchmark/benchmark.h>

#include "gdesc/descent.hpp"
#include "gdesc/greedy.hpp"
#include "gdesc/random.hpp"

using namespace gdesc;

namespace {

struct Fixture {
  SmoothSpace sp;
  Dictionary dict;
  Vector f0;

  Fixture(int d, int n)
      : sp(SmoothSpace::lp(d, 2.0)),
        dict(build_random_sphere(sp, n, 12345)) {
    auto rng = make_rng(54321);
    f0 = random_gaussian(d, rng);
  }
};

}  // namespace

static void BM_SelectAtom(benchmark::State& state) {
  Fixture fx(int(state.range(0)), int(state.range(1)));
  for (auto _ : state)
    benchmark::DoNotOptimize(select_atom(fx.f0, fx.dict, fx.sp, 1.0));
}
BENCHMARK(BM_SelectAtom)->Args({16, 64})->Args({64, 512});

static void BM_Woga(benchmark::State& state) {
  Fixture fx(16, 64);
  GreedyConfig cfg;
  cfg.max_iter = int(state.range(0));
  cfg.stop_norm = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(run_woga(fx.f0, fx.dict, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Woga)->Arg(16)->Arg(64);

static void BM_Wcga_p4(benchmark::State& state) {
  auto sp = SmoothSpace::lp(16, 4.0);
  auto dict = build_random_sphere(sp, 64, 12345);
  auto rng = make_rng(54321);
  Vector f0 = random_gaussian(16, rng);
  GreedyConfig cfg;
  cfg.max_iter = int(state.range(0));
  cfg.stop_norm = 0.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(run_wcga(f0, dict, sp, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Wcga_p4)->Arg(8)->Arg(16);

static void BM_Dga(benchmark::State& state) {
  Fixture fx(8, 32);
  GreedyConfig cfg;
  cfg.max_iter = int(state.range(0));
  cfg.stop_norm = 0.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(run_dga(fx.f0, fx.dict, fx.sp, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Dga)->Arg(100)->Arg(1000);

static void BM_WcgaCo(benchmark::State& state) {
  Fixture fx(16, 64);
  auto energy = make_quadratic_energy(fx.f0);
  GreedyConfig cfg;
  cfg.max_iter = int(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(run_wcga_co(energy, fx.dict, fx.sp, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WcgaCo)->Arg(16)->Arg(64);

BENCHMARK_MAIN();
