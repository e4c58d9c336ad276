#include <benchmark/benchmark.h>

#include "gdesc/dictionary.hpp"
#include "gdesc/random.hpp"
#include "gdesc/verify.hpp"

using namespace gdesc;

static void BM_BetaBruteforceD2(benchmark::State& state) {
  auto dict = build_random_sphere(SmoothSpace::lp(2, 2.0), 16, 7);
  for (auto _ : state)
    benchmark::DoNotOptimize(beta_bruteforce(dict, state.range(0)));
}
BENCHMARK(BM_BetaBruteforceD2)->Arg(100'000)->Arg(1'000'000);

static void BM_BetaBruteforceD3(benchmark::State& state) {
  auto dict = build_random_sphere(SmoothSpace::lp(3, 2.0), 16, 7);
  for (auto _ : state)
    benchmark::DoNotOptimize(beta_bruteforce(dict, state.range(0)));
}
BENCHMARK(BM_BetaBruteforceD3)->Arg(100'000)->Arg(1'000'000);

static void BM_BetaUpper(benchmark::State& state) {
  auto dict = build_canonical(SmoothSpace::lp(int(state.range(0)), 2.0));
  for (auto _ : state)
    benchmark::DoNotOptimize(beta_upper(dict, 16, 12345));
}
BENCHMARK(BM_BetaUpper)->Arg(16)->Arg(64);

static void BM_Coherence(benchmark::State& state) {
  auto dict =
      build_random_sphere(SmoothSpace::lp(20, 2.0), int(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(coherence(dict));
}
BENCHMARK(BM_Coherence)->Arg(40)->Arg(400);

static void BM_IncoherentPacking(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(
        build_incoherent(16, int(state.range(0)), 0.4, 1'000'000, 7));
}
BENCHMARK(BM_IncoherentPacking)->Arg(16)->Arg(32);

static void BM_SigmaM(benchmark::State& state) {
  auto dict = build_random_sphere(SmoothSpace::lp(6, 2.0), 20, 7);
  auto rng = make_rng(8);
  Vector f0 = random_gaussian(6, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(sigma_m_bruteforce(f0, dict, int(state.range(0))));
}
BENCHMARK(BM_SigmaM)->Arg(2)->Arg(4);

static void BM_AtomicNormBounds(benchmark::State& state) {
  auto dict = build_random_sphere(SmoothSpace::lp(2, 2.0), 8, 7);
  auto rng = make_rng(9);
  Vector x = random_gaussian(2, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(atomic_norm_bounds(x, dict));
}
BENCHMARK(BM_AtomicNormBounds);

BENCHMARK_MAIN();
