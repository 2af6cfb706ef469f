#include <benchmark/benchmark.h>

#include "drivepg/simulator.hpp"

namespace {

void BM_Step(benchmark::State& state) {
  drivepg::sim::Environment env{drivepg::sim::builtin_track("scurve")};
  const auto start = drivepg::sim::reset(env.track);
  auto car = start;
  for (auto _ : state) {
    auto out = drivepg::sim::step(env, car, {0.5, 0.0, 0.02});
    car = out.result.terminal ? start : out.state;
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_Step);

void BM_RangeFinders(benchmark::State& state) {
  const auto track = drivepg::sim::builtin_track("oval");
  const auto car = drivepg::sim::place(track, 300.0, 1.5, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(drivepg::sim::range_finders(car, track));
}
BENCHMARK(BM_RangeFinders);

}  // namespace
