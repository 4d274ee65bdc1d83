#include <benchmark/benchmark.h>

#include "superfractal/dimension.hpp"
#include "superfractal/ifs.hpp"
#include "superfractal/superfractal.hpp"

using namespace superfractal;

namespace {

Ifs sierpinski() {
  return Ifs::uniform({Map2::affine(0.5, 0, 0, 0, 0.5, 0), Map2::affine(0.5, 0, 0.5, 0, 0.5, 0),
                       Map2::affine(0.5, 0, 0.25, 0, 0.5, 0.5)});
}

SuperIfs fish(std::size_t screens) {
  const Ifs a = Ifs::uniform({Map2::affine(0.5, -0.375, 0.3125, 0.5, 0.375, 0.1875),
                              Map2::affine(0.5, 0.375, 0.1875, -0.5, 0.375, 0.6875)});
  const Ifs b = Ifs::uniform({Map2::affine(0.5, -0.375, 0.3125, -0.5, -0.375, 0.8125),
                              Map2::affine(0.5, 0.375, 0.1875, 0.5, -0.375, 0.3125)});
  return SuperIfs({a, b}, {0.5, 0.5}, screens);
}

void BM_ChaosGame(benchmark::State& state) {
  ChaosGameOptions opt;
  opt.seed = 1;
  opt.n_points = std::size_t(state.range(0));
  const Grid grid(256, 256);
  for (auto _ : state) benchmark::DoNotOptimize(chaos_game_raster(sierpinski(), opt, grid));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ChaosGame)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

void BM_HutchinsonSet(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  const Raster full = Raster::filled(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(hutchinson_set(sierpinski(), full));
}
BENCHMARK(BM_HutchinsonSet)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_SuperStepSets(benchmark::State& state) {
  const SuperIfs s = fish(std::size_t(state.range(0)));
  SetBank bank;
  for (std::size_t v = 0; v < s.screens(); ++v) bank.screens.push_back(Raster::filled(256, 256));
  Rng rng(3);
  for (auto _ : state) bank = super_step_sets(s, s.sample(rng), bank);
}
BENCHMARK(BM_SuperStepSets)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Lyapunov(benchmark::State& state) {
  const ScaleTable t({{0.5, 0.5, 0.5}, {1.0 / 3, 1.0 / 3, 1.0 / 3}});
  const std::vector<double> p{0.5, 0.5};
  LyapunovOptions opt;
  opt.steps = 10000;
  opt.replicas = 2;
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov(t, p, std::size_t(state.range(0)), 1.25, 5, opt));
  state.SetItemsProcessed(state.iterations() * opt.steps * opt.replicas);
}
BENCHMARK(BM_Lyapunov)->Arg(2)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
