#include <benchmark/benchmark.h>

#include "masec/ao.hpp"
#include "masec/scenario.hpp"

using namespace masec;

namespace {

struct Fixture {
  SystemConfig config;
  Scenario scenario;
  AntennaLayout layout;
  ChannelSet channels;
  TxSolution solution;

  explicit Fixture(const SystemConfig& c) : config(c), scenario(build_scenario(c, 1)) {
    layout = grid_layout(c);
    channels = materialize(layout, scenario.gains, c.wavelength);
    solution = initial_solution(channels, c);
  }
};

SystemConfig sized(int antennas) {
  SystemConfig c = table1_config();
  c.num_tx = c.num_rx = antennas;
  return c;
}

void BM_Materialize(benchmark::State& state) {
  const Fixture f(sized(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(materialize(f.layout, f.scenario.gains));
}
BENCHMARK(BM_Materialize)->Arg(4)->Arg(6)->Arg(8);

void BM_LayoutSsr(benchmark::State& state) {
  const Fixture f(sized(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(layout_ssr(f.layout, f.scenario.gains, f.solution, f.config, {}));
}
BENCHMARK(BM_LayoutSsr)->Arg(4)->Arg(6)->Arg(8);

void BM_OptimalReceiver(benchmark::State& state) {
  const Fixture f(sized(6));
  const auto& s = f.solution;
  for (auto _ : state) benchmark::DoNotOptimize(optimal_receiver(f.channels, s.w, s.v, s.p, 0, f.config));
}
BENCHMARK(BM_OptimalReceiver);

void BM_OptimizeTx(benchmark::State& state) {
  const Fixture f(sized(static_cast<int>(state.range(0))));
  const ScaPoint init = default_sca_init(f.channels, f.config);
  for (auto _ : state) benchmark::DoNotOptimize(optimize_tx(f.channels, f.solution.b, init, f.config));
}
BENCHMARK(BM_OptimizeTx)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_SwarmStep(benchmark::State& state) {
  const Fixture f(sized(6));
  const SsrEvaluator eval = [&](const RVec& u) {
    return layout_ssr(AntennaLayout::from_vector(u, f.config.num_tx, f.config.num_rx), f.scenario.gains, f.solution,
                      f.config, {});
  };
  Rng rng(2);
  SwarmState swarm = initialize_swarm(eval, f.config, rng);
  for (auto _ : state) benchmark::DoNotOptimize(swarm_step(swarm, eval, f.config, rng));
}
BENCHMARK(BM_SwarmStep)->Unit(benchmark::kMillisecond);

void BM_AoDesk(benchmark::State& state) {
  SystemConfig c = desk_config();
  c.ao.max_iterations = 3;
  const Scenario sc = build_scenario(c, 3);
  for (auto _ : state) benchmark::DoNotOptimize(run_ao(sc.gains, c, {}, Rng(4)));
}
BENCHMARK(BM_AoDesk)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace
BENCHMARK_MAIN();
