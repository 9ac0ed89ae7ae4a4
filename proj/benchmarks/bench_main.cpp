#include <benchmark/benchmark.h>

#include <random>

#include "rankdeg/collocation.hpp"
#include "rankdeg/dae_solver.hpp"
#include "rankdeg/examples.hpp"
#include "rankdeg/index_chain.hpp"
#include "rankdeg/linearization.hpp"

using namespace rankdeg;

static void BM_SemiInverse(benchmark::State& state) {
  const int r = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  Mat a(r, r - 1);
  Mat b(r - 1, r);
  for (int i = 0; i < r * (r - 1); ++i) {
    a.data()[i] = n(rng);
    b.data()[i] = n(rng);
  }
  const Mat m = a * b;
  for (auto _ : state) benchmark::DoNotOptimize(semi_inverse(m));
}
BENCHMARK(BM_SemiInverse)->Arg(2)->Arg(4)->Arg(6);

static void BM_IndexChainPair(benchmark::State& state) {
  const auto p = std::get<LinearIAE>(example("pair-nu2"));
  const auto grid = uniform_grid(p.domain(), kDefaultGridPoints);
  for (auto _ : state) benchmark::DoNotOptimize(rank_degree_index(p, grid));
}
BENCHMARK(BM_IndexChainPair);

static void BM_ClassifyEx32(benchmark::State& state) {
  const auto p = std::get<SemiNonlinearDAE>(example("ex32"));
  const auto traj = TrajectorySample::from_function(*p.exact, p.domain(), 2001);
  for (auto _ : state) benchmark::DoNotOptimize(classify(p, traj, {1.0, 2.0}));
}
BENCHMARK(BM_ClassifyEx32)->Unit(benchmark::kMillisecond);

static void BM_SolveDaeEx32(benchmark::State& state) {
  const auto p = std::get<SemiNonlinearDAE>(example("ex32"));
  DaeSolveConfig cfg;
  cfg.h = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(solve_dae(p, cfg, {0.5, 1.0}));
}
BENCHMARK(BM_SolveDaeEx32)->Unit(benchmark::kMillisecond);

static void BM_SolveIaeEx34(benchmark::State& state) {
  const auto p = std::get<SemiNonlinearIAE>(example("ex34"));
  CollocationConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(solve_iae(p, cfg, {1.0, 2.0}));
}
BENCHMARK(BM_SolveIaeEx34)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
