#include <benchmark/benchmark.h>

#include "drivepg/agent.hpp"
#include "drivepg/replay_buffer.hpp"
#include "drivepg/simulator.hpp"

namespace {

// Full DDPG update (targets, critic, actor, soft update) at the default widths.
void BM_TrainOnBatch(benchmark::State& state) {
  drivepg::Rng rng(1);
  auto agent = drivepg::ddpg::DdpgAgent::create({}, rng);
  const auto track = drivepg::sim::builtin_track("oval");
  drivepg::sim::Environment env{track};
  drivepg::ddpg::ReplayBuffer buffer(1000, drivepg::Rng(2));
  auto car = drivepg::sim::reset(track);
  auto obs = drivepg::sim::observe(car, track);
  for (int i = 0; i < 64; ++i) {
    const drivepg::Action a{0.8, 0.0, 0.05};
    const auto out = drivepg::sim::step(env, car, a);
    buffer.push({obs, a, out.result.reward, out.result.observation, false});
    car = out.state;
    obs = out.result.observation;
  }
  const auto batch = buffer.sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(drivepg::ddpg::train_on_batch(agent, batch));
}
BENCHMARK(BM_TrainOnBatch)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
