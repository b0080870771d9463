// Microbenchmarks for the hot paths: environment draws, detection stacks,
// placement, and Monte Carlo evaluation, all at the operational grid scale.

#include <benchmark/benchmark.h>

#include <cstddef>
#include <vector>

#include "voidplace/fields.hpp"
#include "voidplace/grid.hpp"
#include "voidplace/placement.hpp"
#include "voidplace/rng.hpp"
#include "voidplace/sensing.hpp"

namespace {

using namespace voidplace;

SpaceTimeGrid bench_grid() { return make_grid(0.0, 10.0, 0.0, 24.0, 200, 48); }

SensorSet spread_sensors(std::size_t count) {
  SensorSet sensors;
  sensors.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double frac = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
    sensors.push_back({10.0 * frac, 1.2});
  }
  return sensors;
}

void BM_gp_draw(benchmark::State& state) {
  const auto grid = bench_grid();
  const SeparableKernel kernel;
  GpSampler sampler(grid, kernel);
  SplitRng rng(42);
  for (auto _ : state) {
    ScalarField field = sampler.draw(rng, -5.0);
    benchmark::DoNotOptimize(field.values.data());
  }
  state.SetItemsProcessed(state.iterations() * grid.size());
}
BENCHMARK(BM_gp_draw);

void BM_detection_matrix(benchmark::State& state) {
  const auto grid = bench_grid();
  const SeparableKernel kernel;
  const auto sensors = spread_sensors(static_cast<std::size_t>(state.range(0)));
  SplitRng rng(7);
  const ScalarField omega = omega_sampler(grid, kernel, SquashParams{})(rng);
  const AvailabilityParams avail;
  for (auto _ : state) {
    DetectionMatrix matrix =
        build_detection_matrix(grid, sensors, omega, avail, true);
    benchmark::DoNotOptimize(matrix.p_tilde.data());
  }
  state.SetItemsProcessed(state.iterations() * sensors.size() *
                          grid.size());
}
BENCHMARK(BM_detection_matrix)->Arg(4)->Arg(16);

void BM_expected_detection_matrix(benchmark::State& state) {
  const auto grid = bench_grid();
  const SeparableKernel kernel;
  const auto sensors = spread_sensors(static_cast<std::size_t>(state.range(0)));
  const AvailabilityParams avail;
  for (auto _ : state) {
    DetectionMatrix matrix = expected_detection_matrix(
        grid, sensors, kernel.sigma, SquashParams{}, avail, true);
    benchmark::DoNotOptimize(matrix.p_tilde.data());
  }
  state.SetItemsProcessed(state.iterations() * sensors.size() *
                          grid.size());
}
BENCHMARK(BM_expected_detection_matrix)->Arg(4)->Arg(16);

void BM_greedy_place(benchmark::State& state) {
  const auto grid = bench_grid();
  const SeparableKernel kernel;
  const auto candidates = spread_sensors(40);
  const ScalarField intensity = sample_lgcp_intensity(grid, kernel, -5.0, 11);
  const DetectionMatrix surface = expected_detection_matrix(
      grid, candidates, kernel.sigma, SquashParams{}, AvailabilityParams{});
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    Placement plan = greedy_place(intensity, surface, k);
    benchmark::DoNotOptimize(plan.selected.data());
  }
}
BENCHMARK(BM_greedy_place)->Arg(4)->Arg(8);

void BM_ensemble_evaluate(benchmark::State& state) {
  const auto grid = bench_grid();
  const SeparableKernel kernel;
  const auto candidates = spread_sensors(40);
  const EvalEnsemble ensemble(lgcp_sampler(grid, kernel, -5.0),
                              omega_sampler(grid, kernel, SquashParams{}),
                              /*realizations=*/10, /*seed=*/99);
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < 8; ++i) selected.push_back(i * 5);
  const AvailabilityParams avail;
  for (auto _ : state) {
    VoidEstimate estimate = ensemble.evaluate(candidates, selected, avail);
    benchmark::DoNotOptimize(estimate.nu_mean);
  }
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_ensemble_evaluate);

}  // namespace

BENCHMARK_MAIN();
