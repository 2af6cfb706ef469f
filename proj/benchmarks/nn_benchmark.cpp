#include <benchmark/benchmark.h>

#include "drivepg/nn.hpp"

namespace {

using drivepg::nn::Activation;

drivepg::nn::Mlp actor_sized() {
  const std::size_t sizes[] = {29, 300, 600, 3};
  const Activation acts[] = {Activation::ReLU, Activation::ReLU, Activation::Linear};
  return drivepg::nn::init_network(sizes, acts, 1);
}

void BM_ForwardBatch(benchmark::State& state) {
  const auto net = actor_sized();
  const drivepg::nn::Batch x = drivepg::nn::Batch::Random(29, state.range(0));
  drivepg::nn::ForwardCache cache;
  for (auto _ : state) benchmark::DoNotOptimize(drivepg::nn::forward(net, x, cache));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBatch)->Arg(1)->Arg(32);

void BM_ForwardBackwardBatch(benchmark::State& state) {
  const auto net = actor_sized();
  const drivepg::nn::Batch x = drivepg::nn::Batch::Random(29, state.range(0));
  const drivepg::nn::Batch g = drivepg::nn::Batch::Ones(3, state.range(0));
  drivepg::nn::ForwardCache cache;
  for (auto _ : state) {
    drivepg::nn::forward(net, x, cache);
    benchmark::DoNotOptimize(drivepg::nn::backward(net, cache, g));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBackwardBatch)->Arg(32);

}  // namespace
