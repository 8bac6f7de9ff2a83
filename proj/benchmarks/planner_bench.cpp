#include <benchmark/benchmark.h>

#include "outage/channel.hpp"
#include "outage/recovery.hpp"
#include "outage/relaxed.hpp"
#include "outage/sca.hpp"
#include "outage/scenario_io.hpp"
#include "outage/schemes.hpp"

using namespace outage;

namespace {

Scenario paper(int slots) { return load_scenario_file(OUTAGE_SCENARIO_FILE).with_slots(slots); }

}  // namespace

static void BM_DualFunction(benchmark::State& state) {
  const Scenario s = paper(128);
  const GainField field(s, GridSpec{static_cast<int>(state.range(0))});
  const DualPoint mu(Eigen::VectorXd::Constant(s.num_sensors(), 0.5 * dual_box_bound(s)));
  for (auto _ : state) benchmark::DoNotOptimize(dual_function(mu, s, field).value);
}
BENCHMARK(BM_DualFunction)->Arg(41)->Arg(81)->Unit(benchmark::kMicrosecond);

static void BM_SolveRelaxed(benchmark::State& state) {
  const Scenario s = paper(128);
  const GridSpec grid{static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(solve_relaxed(s, grid).plan.outage_probability);
}
BENCHMARK(BM_SolveRelaxed)->Arg(41)->Arg(81)->Unit(benchmark::kMillisecond);

static void BM_ScaPlan(benchmark::State& state) {
  const Scenario s = paper(static_cast<int>(state.range(0)));
  const Trajectory init = direct_trajectory(s);
  for (auto _ : state) benchmark::DoNotOptimize(plan_sca(s, init).rounds);
}
BENCHMARK(BM_ScaPlan)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_RecoverPowers(benchmark::State& state) {
  const Scenario s = paper(static_cast<int>(state.range(0)));
  const Trajectory tr = direct_trajectory(s);
  const PowerSchedule ps = PowerSchedule::uniform(s);
  for (auto _ : state) benchmark::DoNotOptimize(recover_powers(tr, ps, s).served_slots);
}
BENCHMARK(BM_RecoverPowers)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_FlyHoverFly(benchmark::State& state) {
  const Scenario s = paper(32);
  const GridSpec grid{static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(run_fly_hover_fly(s, grid).outage);
}
BENCHMARK(BM_FlyHoverFly)->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
