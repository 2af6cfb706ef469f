#include "drivepg/agent.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "drivepg/errors.hpp"

namespace drivepg::ddpg {

namespace {

constexpr double kSpeedScale = 300.0;      // km/h
constexpr double kWheelSpinScale = 300.0;  // rad/s

using nn::Activation;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Squashes raw actor outputs (3 x B) and returns d(action)/d(raw) alongside.
void squash(const nn::Batch& raw, nn::Batch& actions, nn::Batch* derivative) {
  actions.resize(raw.rows(), raw.cols());
  if (derivative) derivative->resize(raw.rows(), raw.cols());
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    for (Eigen::Index k = 0; k < 2; ++k) {
      const double s = sigmoid(raw(k, j));
      actions(k, j) = s;
      if (derivative) (*derivative)(k, j) = s * (1.0 - s);
    }
    const double t = std::tanh(raw(2, j));
    actions(2, j) = t;
    if (derivative) (*derivative)(2, j) = 1.0 - t * t;
  }
}

nn::Batch merged_input(const nn::Batch& hidden, const nn::Batch& actions) {
  nn::Batch in(hidden.rows() + actions.rows(), hidden.cols());
  in.topRows(hidden.rows()) = hidden;
  in.bottomRows(actions.rows()) = actions;
  return in;
}

void check_batch(std::span<const Experience> batch) {
  if (batch.empty()) throw UsageError("batch is empty");
}

nn::Batch states_of(std::span<const Experience> batch) {
  nn::Batch f(kObservationSize, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t j = 0; j < batch.size(); ++j) f.col(static_cast<Eigen::Index>(j)) = observation_features(batch[j].state);
  return f;
}

nn::Batch next_states_of(std::span<const Experience> batch) {
  nn::Batch f(kObservationSize, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t j = 0; j < batch.size(); ++j)
    f.col(static_cast<Eigen::Index>(j)) = observation_features(batch[j].next_state);
  return f;
}

nn::Batch actions_of(std::span<const Experience> batch) {
  nn::Batch a(kActionSize, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const auto& x = batch[j].action;
    a.col(static_cast<Eigen::Index>(j)) << x.acceleration, x.brake, x.steering;
  }
  return a;
}

}  // namespace

void AgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigurationError("gamma must lie in (0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigurationError("tau must lie in (0, 1]");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) throw ConfigurationError("learning rates must be positive");
  if (shape.actor_hidden.empty()) throw ConfigurationError("actor needs at least one hidden layer");
  for (std::size_t w : shape.actor_hidden)
    if (w == 0) throw ConfigurationError("actor hidden widths must be positive");
  if (shape.critic_state_width == 0 || shape.critic_merge_width == 0 || shape.critic_hidden_width == 0)
    throw ConfigurationError("critic widths must be positive");
}

DdpgAgent DdpgAgent::create(const AgentConfig& config, Rng& rng) {
  config.validate();
  DdpgAgent agent;
  agent.gamma = config.gamma;
  agent.tau = config.tau;

  std::vector<std::size_t> actor_sizes{kObservationSize};
  std::vector<Activation> actor_acts;
  for (std::size_t w : config.shape.actor_hidden) {
    actor_sizes.push_back(w);
    actor_acts.push_back(Activation::ReLU);
  }
  actor_sizes.push_back(kActionSize);
  actor_acts.push_back(Activation::Linear);
  agent.actor = nn::init_network(actor_sizes, actor_acts, rng);

  const std::size_t state_sizes[] = {kObservationSize, config.shape.critic_state_width};
  const Activation state_acts[] = {Activation::ReLU};
  agent.critic.state_path = nn::init_network(state_sizes, state_acts, rng, {.small_final_layer = false});

  const std::size_t merged_sizes[] = {config.shape.critic_state_width + kActionSize,
                                      config.shape.critic_merge_width,
                                      config.shape.critic_hidden_width, 1};
  const Activation merged_acts[] = {Activation::Linear, Activation::ReLU, Activation::Linear};
  agent.critic.merged = nn::init_network(merged_sizes, merged_acts, rng);

  agent.target_actor = agent.actor;
  agent.target_critic = agent.critic;
  agent.actor_optimizer = nn::AdamState::for_network(agent.actor, {.learning_rate = config.actor_lr});
  agent.critic_optimizer.state_path =
      nn::AdamState::for_network(agent.critic.state_path, {.learning_rate = config.critic_lr});
  agent.critic_optimizer.merged =
      nn::AdamState::for_network(agent.critic.merged, {.learning_rate = config.critic_lr});
  return agent;
}

nn::Vector observation_features(const Observation& obs) {
  nn::Vector f(static_cast<Eigen::Index>(kObservationSize));
  Eigen::Index i = 0;
  f[i++] = obs.angle / std::numbers::pi;
  for (double t : obs.track) f[i++] = t / kRangeFinderMax;
  f[i++] = obs.track_pos;
  f[i++] = obs.speed_x / kSpeedScale;
  f[i++] = obs.speed_y / kSpeedScale;
  f[i++] = obs.speed_z / kSpeedScale;
  for (double w : obs.wheel_spin) f[i++] = w / kWheelSpinScale;
  f[i++] = obs.rpm;
  return f;
}

nn::Batch feature_batch(std::span<const Observation> observations) {
  nn::Batch f(kObservationSize, static_cast<Eigen::Index>(observations.size()));
  for (std::size_t j = 0; j < observations.size(); ++j)
    f.col(static_cast<Eigen::Index>(j)) = observation_features(observations[j]);
  return f;
}

nn::Batch action_batch(std::span<const Action> actions) {
  nn::Batch a(kActionSize, static_cast<Eigen::Index>(actions.size()));
  for (std::size_t j = 0; j < actions.size(); ++j)
    a.col(static_cast<Eigen::Index>(j)) << actions[j].acceleration, actions[j].brake, actions[j].steering;
  return a;
}

nn::Batch policy_actions(const nn::Mlp& actor, const nn::Batch& features) {
  if (actor.output_size() != kActionSize)
    throw ConfigurationError("actor must produce " + std::to_string(kActionSize) + " outputs");
  nn::Batch actions;
  squash(nn::predict(actor, features), actions, nullptr);
  return actions;
}

Action policy(const nn::Mlp& actor, const Observation& obs) {
  const nn::Batch f = observation_features(obs);
  const nn::Batch a = policy_actions(actor, f);
  return {a(0, 0), a(1, 0), a(2, 0)};
}

Action actor_forward(const DdpgAgent& agent, const Observation& obs, bool deterministic,
                     OuNoise& noise, Rng& rng, double epsilon) {
  const Action a = policy(agent.actor, obs);
  if (deterministic) return a;
  const auto n = noise.sample(rng);
  return Action{a.acceleration + epsilon * n[0], a.brake + epsilon * n[1], a.steering + epsilon * n[2]}
      .clamped();
}

nn::Vector critic_values(const Critic& critic, const nn::Batch& features, const nn::Batch& actions) {
  if (actions.rows() != static_cast<Eigen::Index>(kActionSize) || actions.cols() != features.cols())
    throw ConfigurationError("critic expects a 3 x B action batch matching the state batch");
  const nn::Batch hidden = nn::predict(critic.state_path, features);
  return nn::predict(critic.merged, merged_input(hidden, actions)).row(0).transpose();
}

double critic_forward(const DdpgAgent& agent, const Observation& obs, const Action& action) {
  const nn::Batch f = observation_features(obs);
  const nn::Batch a = action_batch(std::span(&action, 1));
  return critic_values(agent.critic, f, a)[0];
}

CriticActionGradient critic_action_gradient(const Critic& critic, const nn::Batch& features,
                                            const nn::Batch& actions) {
  if (actions.rows() != static_cast<Eigen::Index>(kActionSize) || actions.cols() != features.cols())
    throw ConfigurationError("critic expects a 3 x B action batch matching the state batch");
  const nn::Batch hidden = nn::predict(critic.state_path, features);
  nn::ForwardCache cache;
  const nn::Batch q = nn::forward(critic.merged, merged_input(hidden, actions), cache);
  const nn::Batch ones = nn::Batch::Ones(1, q.cols());
  const auto back = nn::backward(critic.merged, cache, ones, {.parameters = false});
  return {q.row(0).transpose(), back.input_gradient.bottomRows(kActionSize)};
}

std::vector<double> compute_td_targets(std::span<const Experience> batch, const DdpgAgent& agent) {
  check_batch(batch);
  const nn::Batch next = next_states_of(batch);
  const nn::Batch next_actions = policy_actions(agent.target_actor, next);
  const nn::Vector next_q = critic_values(agent.target_critic, next, next_actions);
  std::vector<double> y(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i)
    y[i] = batch[i].terminal ? batch[i].reward
                             : batch[i].reward + agent.gamma * next_q[static_cast<Eigen::Index>(i)];
  return y;
}

double critic_update(DdpgAgent& agent, std::span<const Experience> batch,
                     std::span<const double> targets) {
  check_batch(batch);
  if (targets.size() != batch.size())
    throw UsageError("target count " + std::to_string(targets.size()) + " != batch size " +
                     std::to_string(batch.size()));
  const nn::Batch states = states_of(batch);
  const nn::Batch actions = actions_of(batch);
  Critic& critic = agent.critic;

  nn::ForwardCache state_cache;
  const nn::Batch hidden = nn::forward(critic.state_path, states, state_cache);
  nn::ForwardCache merged_cache;
  const nn::Batch q = nn::forward(critic.merged, merged_input(hidden, actions), merged_cache);

  const double n = static_cast<double>(batch.size());
  nn::Batch dloss(1, q.cols());
  double loss = 0.0;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const double err = q(0, j) - targets[static_cast<std::size_t>(j)];
    loss += err * err;
    dloss(0, j) = 2.0 * err / n;
  }
  loss /= n;
  if (!std::isfinite(loss)) throw TrainingError("critic loss is not finite");

  const auto merged_back = nn::backward(critic.merged, merged_cache, dloss);
  const nn::Batch dhidden = merged_back.input_gradient.topRows(hidden.rows());
  const auto state_back = nn::backward(critic.state_path, state_cache, dhidden, {.input = false});

  nn::adam_step(critic.merged, merged_back.parameters, agent.critic_optimizer.merged);
  nn::adam_step(critic.state_path, state_back.parameters, agent.critic_optimizer.state_path);
  return loss;
}

PolicyGradient policy_gradient(const nn::Mlp& actor, const nn::Batch& features,
                               const ActionValueGradient& value_gradient) {
  if (features.cols() == 0) throw UsageError("batch is empty");
  if (actor.output_size() != kActionSize)
    throw ConfigurationError("actor must produce " + std::to_string(kActionSize) + " outputs");
  nn::ForwardCache cache;
  const nn::Batch raw = nn::forward(actor, features, cache);
  nn::Batch actions;
  nn::Batch dsquash;
  squash(raw, actions, &dsquash);

  const CriticActionGradient q = value_gradient(actions);
  if (q.action_gradient.rows() != actions.rows() || q.action_gradient.cols() != actions.cols())
    throw UsageError("action gradient shape does not match the action batch");
  const double n = static_cast<double>(features.cols());
  // Descent direction for -mean Q.
  const nn::Batch draw = -(q.action_gradient.cwiseProduct(dsquash)) / n;
  auto back = nn::backward(actor, cache, draw, {.input = false});
  return {q.values.mean(), std::move(back.parameters)};
}

double actor_ascent_step(nn::Mlp& actor, nn::AdamState& optimizer, const nn::Batch& features,
                         const ActionValueGradient& value_gradient) {
  const PolicyGradient g = policy_gradient(actor, features, value_gradient);
  nn::adam_step(actor, g.descent, optimizer);
  return g.objective;
}

double actor_update(DdpgAgent& agent, std::span<const Experience> batch) {
  check_batch(batch);
  const nn::Batch states = states_of(batch);
  const Critic& critic = agent.critic;
  return actor_ascent_step(agent.actor, agent.actor_optimizer, states,
                           [&](const nn::Batch& actions) {
                             return critic_action_gradient(critic, states, actions);
                           });
}

void soft_update(nn::Mlp& target, const nn::Mlp& online, double tau) {
  if (target.layers.size() != online.layers.size())
    throw UsageError("soft update between networks of different depth");
  for (std::size_t i = 0; i < target.layers.size(); ++i) {
    auto& t = target.layers[i];
    const auto& o = online.layers[i];
    if (t.weights.rows() != o.weights.rows() || t.weights.cols() != o.weights.cols() ||
        t.biases.size() != o.biases.size())
      throw UsageError("soft update shape mismatch at layer " + std::to_string(i));
    t.weights = tau * o.weights + (1.0 - tau) * t.weights;
    t.biases = tau * o.biases + (1.0 - tau) * t.biases;
  }
}

void soft_update(DdpgAgent& agent) {
  soft_update(agent.target_actor, agent.actor, agent.tau);
  soft_update(agent.target_critic.state_path, agent.critic.state_path, agent.tau);
  soft_update(agent.target_critic.merged, agent.critic.merged, agent.tau);
}

UpdateStats train_on_batch(DdpgAgent& agent, std::span<const Experience> batch) {
  UpdateStats stats;
  const auto targets = compute_td_targets(batch, agent);
  stats.critic_loss = critic_update(agent, batch, targets);
  stats.actor_objective = actor_update(agent, batch);
  soft_update(agent);
  return stats;
}

}  // namespace drivepg::ddpg
