#include <benchmark/benchmark.h>

#include "pia/bench.hpp"
#include "pia/channel.hpp"
#include "pia/experiment.hpp"
#include "pia/geometry.hpp"
#include "pia/optimizer.hpp"
#include "pia/precoding.hpp"
#include "pia/rng.hpp"

namespace {

pia::ChannelSet make_channels(int side) {
  pia::ExperimentConfig cfg = pia::default_experiment();
  cfg.grid.columns = side;
  cfg.grid.rows = side;
  const pia::ReferenceGrid grid = pia::make_reference_grid(cfg.grid);
  pia::Rng rng(pia::derive_seed(42, pia::Stream::eval_drops, 0));
  const pia::UserDrop drop = pia::sample_drop(cfg.scenario, rng);
  return pia::channel_matrices(grid.layout, drop, cfg.scenario);
}

void BM_sum_rate(benchmark::State& state) {
  const pia::ScenarioConfig scenario = pia::default_scenario();
  const pia::ChannelSet channels = make_channels(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        pia::sum_rate(channels, scenario.noise_w, scenario.power_w).sum);
}
BENCHMARK(BM_sum_rate)->Arg(4)->Arg(6);

void BM_channel_matrices(benchmark::State& state) {
  pia::ExperimentConfig cfg = pia::default_experiment();
  const pia::ReferenceGrid grid = pia::make_reference_grid(cfg.grid);
  pia::Rng rng(pia::derive_seed(42, pia::Stream::eval_drops, 0));
  const pia::UserDrop drop = pia::sample_drop(cfg.scenario, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        pia::channel_matrices(grid.layout, drop, cfg.scenario).per_user);
}
BENCHMARK(BM_channel_matrices);

void BM_waterfill(benchmark::State& state) {
  pia::Rng rng(7);
  std::vector<double> gains(12);
  for (double& g : gains) g = rng.uniform(0.1, 10.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(pia::waterfill(gains, 50.0).powers);
}
BENCHMARK(BM_waterfill);

void BM_pso_iteration(benchmark::State& state) {
  pia::ExperimentConfig cfg = pia::default_experiment();
  cfg.scenario.users = 2;
  cfg.grid.columns = 2;
  cfg.grid.rows = 2;
  pia::PsoConfig pso;
  pso.particles = 8;
  pso.iterations = 1;
  pso.drops_per_iteration = 4;
  pso.seed = 11;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        pia::optimize_pia(cfg.grid, cfg.scenario, pso, 1).best_value);
}
BENCHMARK(BM_pso_iteration);

}  // namespace

BENCHMARK_MAIN();
