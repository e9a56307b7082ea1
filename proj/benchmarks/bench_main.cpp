#include <benchmark/benchmark.h>

#include <cmath>

#include "sgsteer/boxes.hpp"
#include "sgsteer/measurement.hpp"
#include "sgsteer/numerics.hpp"
#include "sgsteer/protocol.hpp"
#include "sgsteer/wavefunction.hpp"

namespace {

using namespace sgsteer;

void BM_QuadratureGaussian(benchmark::State& state) {
  QuadratureSpec spec;
  spec.lower = -20.0;
  spec.upper = 20.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        integrate_complex([](double z) { return std::exp(-z * z / 2.0 + kI * 3.0 * z); }, spec));
  }
}
BENCHMARK(BM_QuadratureGaussian);

void BM_BranchOverlap(benchmark::State& state) {
  const PhysParams p;
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(branch_overlap(t, p));
    t = t > 10.0 ? 0.0 : t + 0.01;
  }
}
BENCHMARK(BM_BranchOverlap);

void BM_EvaluateState(benchmark::State& state) {
  const PhysParams p;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_state(0.1, -0.2, 0.7, 1.5, p));
}
BENCHMARK(BM_EvaluateState);

void BM_Measure(benchmark::State& state) {
  const PhysParams p;
  const auto setting = static_cast<Setting>(state.range(0));
  RngStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(measure(setting, 2.0, p, rng));
  state.SetLabel(std::string(to_string(setting)));
}
BENCHMARK(BM_Measure)->DenseRange(0, 3);

void BM_TraceDistance(benchmark::State& state) {
  const auto a = DensityMatrix4::pure(make_psi2());
  const auto b = assemblage(make_psi2(), Setting::kSpinX).members[0].state;
  for (auto _ : state) benchmark::DoNotOptimize(trace_distance(a, b));
}
BENCHMARK(BM_TraceDistance);

void BM_RunExperiment(benchmark::State& state) {
  RunConfig c;
  c.n_atoms = static_cast<std::uint64_t>(state.range(0));
  c.evolution_time = 1.0;
  c.threads = static_cast<unsigned>(state.range(1));
  c.schedule = {ScheduleKind::kRandom, {Setting::kPositionZ, Setting::kSpinZ, Setting::kSpinX, Setting::kMomentumZ}};
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunExperiment)->Args({100'000, 1})->Args({100'000, 4})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
