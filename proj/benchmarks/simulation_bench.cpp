#include <benchmark/benchmark.h>

#include <string>

#include "marketsim/scenario/scenario.hpp"
#include "marketsim/simnet/scheduler.hpp"

namespace {

using namespace marketsim;

void BM_SchedulerTimers(benchmark::State& state) {
  const int64_t n = state.range(0);
  for (auto _ : state) {
    simnet::Scheduler s;
    size_t hits = 0;
    const auto a = s.add_endpoint("a", [&](const simnet::Event&) { ++hits; });
    for (int64_t i = 0; i < n; ++i) s.schedule(SimTime{(i * 7919) % 100'000}, a, a, Timer{static_cast<uint64_t>(i)});
    s.run_until(SimTime{100'000});
    benchmark::DoNotOptimize(hits);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SchedulerTimers)->Arg(10'000)->Arg(100'000);

void BM_Scenario(benchmark::State& state, const std::string& name) {
  const auto cfg = scenario::load_scenario(std::string(MARKETSIM_SCENARIO_DIR) + "/" + name + ".json");
  size_t events = 0;
  for (auto _ : state) {
    const auto r = scenario::run(cfg);
    events += r.trace.event_count;
    benchmark::DoNotOptimize(r.trace.event_hash);
  }
  state.SetItemsProcessed(static_cast<int64_t>(events));
}
BENCHMARK_CAPTURE(BM_Scenario, honest_baseline, std::string("honest_baseline"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Scenario, snipe_baseline, std::string("snipe_baseline"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Scenario, quote_stuff, std::string("quote_stuff"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Scenario, fingerprint, std::string("fingerprint"))->Unit(benchmark::kMillisecond);

}  // namespace
