#pragma once

#include <cstdint>
#include <span>

#include "drivepg/nn.hpp"

namespace drivepg::nn {

struct AdamHyperparameters {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moments for one network, shaped like its parameters.
struct AdamState {
  Gradients first_moment;
  Gradients second_moment;
  std::uint64_t step_count = 0;
  AdamHyperparameters hyper;

  static AdamState for_network(const Mlp& net, AdamHyperparameters hyper);
  friend bool operator==(const AdamState& a, const AdamState& b);
};

/// Element-wise Adam with bias correction for a flat parameter block.
/// `step` is the 1-based step index used for the correction terms.
void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> first_moment, std::span<double> second_moment,
                 std::uint64_t step, const AdamHyperparameters& hyper);

/// One descent step on `net`. All gradients are checked before any parameter
/// changes; a non-finite component throws TrainingError naming its layer.
void adam_step(Mlp& net, const Gradients& grads, AdamState& state);

}  // namespace drivepg::nn
