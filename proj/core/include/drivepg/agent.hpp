#pragma once

// Deep deterministic policy gradient learner.
//
// The actor maps a scaled observation to three linear outputs, squashed by
// sigmoid (acceleration, brake) and tanh (steering). The critic sees the
// state through one ReLU layer; the action joins at the second layer, which
// is the linear map of [state features; action], i.e. the sum of a linear
// map over the first hidden layer and one over the action. A ReLU layer and
// a linear scalar head follow.
//
// Targets for the critic come from slowly tracking copies of both networks:
//   y = r + gamma * Q'(s', mu'(s'))          (y = r for terminal transitions)
// The critic regresses Q(s, a) onto y with a batch mean-squared error. The
// actor ascends mean_i Q(s_i, mu(s_i)) using dQ/da from the critic, chained
// through the actor by backpropagation. After each update the targets blend
// toward the online weights: target <- tau * online + (1 - tau) * target.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "drivepg/adam.hpp"
#include "drivepg/nn.hpp"
#include "drivepg/noise.hpp"
#include "drivepg/random.hpp"
#include "drivepg/types.hpp"

namespace drivepg::ddpg {

struct NetworkShape {
  std::vector<std::size_t> actor_hidden{300, 600};
  std::size_t critic_state_width = 300;
  std::size_t critic_merge_width = 600;
  std::size_t critic_hidden_width = 600;
};

struct AgentConfig {
  NetworkShape shape;
  double gamma = 0.99;
  double tau = 0.001;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;

  /// Throws ConfigurationError for gamma/tau outside (0, 1], non-positive rates or widths.
  void validate() const;
};

struct Critic {
  nn::Mlp state_path;  // features -> first hidden layer (ReLU)
  nn::Mlp merged;      // [first hidden; action] -> merge (linear) -> ReLU -> Q

  std::size_t state_width() const { return state_path.output_size(); }
  friend bool operator==(const Critic&, const Critic&) = default;
};

struct CriticOptimizer {
  nn::AdamState state_path;
  nn::AdamState merged;
  friend bool operator==(const CriticOptimizer&, const CriticOptimizer&) = default;
};

struct DdpgAgent {
  nn::Mlp actor;
  Critic critic;
  nn::Mlp target_actor;
  Critic target_critic;
  nn::AdamState actor_optimizer;
  CriticOptimizer critic_optimizer;
  double gamma = 0.99;
  double tau = 0.001;

  /// Fresh networks drawn from `rng`; targets start as exact copies.
  static DdpgAgent create(const AgentConfig& config, Rng& rng);

  friend bool operator==(const DdpgAgent&, const DdpgAgent&) = default;
};

/// Observation scaled to roughly unit range for the networks.
nn::Vector observation_features(const Observation& obs);
nn::Batch feature_batch(std::span<const Observation> observations);
nn::Batch action_batch(std::span<const Action> actions);

/// Deterministic policy on a batch of features; returns squashed actions (3 x B).
nn::Batch policy_actions(const nn::Mlp& actor, const nn::Batch& features);
Action policy(const nn::Mlp& actor, const Observation& obs);

/// Action selection. With `deterministic` the squashed heads are returned
/// as-is. Otherwise one OU sample scaled by `epsilon` is added and the result
/// clamped to the action ranges.
Action actor_forward(const DdpgAgent& agent, const Observation& obs, bool deterministic,
                     OuNoise& noise, Rng& rng, double epsilon);

/// Q-values for a batch (features 29 x B, actions 3 x B); returns length B.
nn::Vector critic_values(const Critic& critic, const nn::Batch& features, const nn::Batch& actions);
double critic_forward(const DdpgAgent& agent, const Observation& obs, const Action& action);

/// Q-values and dQ/da (3 x B) for a batch.
struct CriticActionGradient {
  nn::Vector values;
  nn::Batch action_gradient;
};
CriticActionGradient critic_action_gradient(const Critic& critic, const nn::Batch& features,
                                            const nn::Batch& actions);

/// TD targets from the target networks only.
std::vector<double> compute_td_targets(std::span<const Experience> batch, const DdpgAgent& agent);

/// One Adam step on the critic toward `targets`; returns the loss before the step.
double critic_update(DdpgAgent& agent, std::span<const Experience> batch,
                     std::span<const double> targets);

/// Supplies Q and dQ/da for a batch of squashed actions (3 x B).
using ActionValueGradient = std::function<CriticActionGradient(const nn::Batch& actions)>;

struct PolicyGradient {
  double objective = 0.0;  // mean Q over the batch
  nn::Gradients descent;   // d(-objective)/d(actor parameters)
};

/// Chains dQ/da through the squashing heads and the actor network.
PolicyGradient policy_gradient(const nn::Mlp& actor, const nn::Batch& features,
                               const ActionValueGradient& value_gradient);

/// One Adam ascent step on mean Q over `features` using `value_gradient` as the
/// critic. Returns mean Q before the step.
double actor_ascent_step(nn::Mlp& actor, nn::AdamState& optimizer, const nn::Batch& features,
                         const ActionValueGradient& value_gradient);

/// Policy-gradient step through the online critic; returns mean Q before the step.
double actor_update(DdpgAgent& agent, std::span<const Experience> batch);

/// target <- tau * online + (1 - tau) * target
void soft_update(nn::Mlp& target, const nn::Mlp& online, double tau);
void soft_update(DdpgAgent& agent);

struct UpdateStats {
  double critic_loss = 0.0;
  double actor_objective = 0.0;
};

/// Full learner step on one batch: targets, critic, actor, soft update.
UpdateStats train_on_batch(DdpgAgent& agent, std::span<const Experience> batch);

}  // namespace drivepg::ddpg
