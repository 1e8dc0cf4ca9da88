#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "skytrack/engine.hpp"
#include "skytrack/hungarian.hpp"
#include "skytrack/synth.hpp"
#include "skytrack/tracker.hpp"

namespace {

using namespace skytrack;

void BM_Hungarian(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CostMatrix c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(hungarian_min_cost(c));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Hungarian)->RangeMultiplier(2)->Range(4, 128)->Complexity();

// One tracker step with 27 vehicles in view, the busiest preset.
void BM_TrackerStep27(benchmark::State& state) {
  const SynthOutput gen = generate(preset("load-27"));
  SortTracker tracker;
  std::size_t i = 0;
  for (auto _ : state) {
    if (i == gen.detections.size()) {
      state.PauseTiming();
      tracker.reset();
      i = 0;
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(tracker.step(gen.detections[i++]));
  }
}
BENCHMARK(BM_TrackerStep27);

// Full per-frame stage: tracking, analytics, macro snapshot, overlay.
void BM_EngineFrame27(benchmark::State& state) {
  const Scenario s = preset("load-27");
  const SynthOutput gen = generate(s);
  EngineConfig cfg;
  cfg.camera = s.camera;
  cfg.video = s.image;
  cfg.view = {1024, 768};
  cfg.lane_center = BoxCorners{760, 340, 1160, 740};
  auto engine = std::make_unique<Engine>(cfg);
  std::size_t i = 0;
  for (auto _ : state) {
    if (i == gen.detections.size()) {
      state.PauseTiming();
      engine = std::make_unique<Engine>(cfg);
      i = 0;
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(engine->process(gen.detections[i++]));
  }
}
BENCHMARK(BM_EngineFrame27);

}  // namespace
BENCHMARK_MAIN();
