#include "drivepg/trainer.hpp"

#include <fstream>

#include "drivepg/errors.hpp"

namespace drivepg::harness {

std::string format_metrics_row(const EpisodeRow& row) {
  const auto& m = row.metrics;
  return std::to_string(row.episode) + "," + std::to_string(m.steps) + "," + format_double(m.total_reward) +
         "," + format_double(m.total_distance_m) + "," + format_double(m.mean_speed_kmh) + "," +
         format_double(m.mean_step_gain) + "," + format_double(m.var_dist_center_m2) + "," +
         format_double(row.epsilon);
}

void write_metrics(std::ostream& out, const std::vector<EpisodeRow>& rows) {
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) out << format_metrics_row(r) << '\n';
}

sim::Environment make_environment(const TrainConfig& config, const std::string& track) {
  sim::Environment env{sim::resolve_track(track), {}, config.reward, {}, config.dt};
  env.limits.max_steps = config.max_steps;
  return env;
}

sim::Environment make_environment(const TrainConfig& config) {
  return make_environment(config, config.track);
}

namespace {

double epsilon_at(const TrainConfig& config, std::uint64_t steps) {
  if (steps >= config.epsilon_decay_steps) return 0.0;
  return 1.0 - static_cast<double>(steps) / static_cast<double>(config.epsilon_decay_steps);
}

/// Truncation at the step cap is not a real terminal state, so the stored
/// transition keeps bootstrapping.
bool is_failure(sim::Termination t) {
  return t == sim::Termination::OutOfTrack || t == sim::Termination::WrongWay;
}

}  // namespace

Trainer::Trainer(TrainConfig config, sim::Environment env, ddpg::DdpgAgent agent,
                 ddpg::ReplayBuffer buffer, Rng root, Rng noise_rng)
    : config_(std::move(config)),
      env_(std::move(env)),
      agent_(std::move(agent)),
      buffer_(std::move(buffer)),
      noise_(config_.ou),
      root_rng_(root),
      noise_rng_(noise_rng) {}

Trainer::Trainer(TrainConfig config) : noise_(config.ou) {
  config.validate();
  config_ = std::move(config);
  env_ = make_environment(config_);
  root_rng_ = Rng(config_.seed);
  Rng init_rng = split(root_rng_);
  noise_rng_ = split(root_rng_);
  Rng buffer_rng = split(root_rng_);
  agent_ = ddpg::DdpgAgent::create(config_.agent_config(), init_rng);
  buffer_ = ddpg::ReplayBuffer(config_.buffer_capacity, buffer_rng);
}

Trainer Trainer::resume(const Checkpoint& c) {
  if (c.version != kCheckpointVersion) throw FormatError("version", "unsupported checkpoint version");
  Trainer t(c.config, make_environment(c.config), c.agent,
            ddpg::ReplayBuffer::restore(c.replay_capacity, c.replay, c.buffer_rng), c.root_rng, c.noise_rng);
  t.noise_.set_state(c.noise_state);
  t.episodes_completed_ = c.episodes_completed;
  t.total_steps_ = c.total_steps;
  return t;
}

double Trainer::epsilon() const { return epsilon_at(config_, total_steps_); }

EpisodeRow Trainer::run_episode(const StepObserver& observer) {
  EpisodeRow row;
  row.episode = episodes_completed_;
  row.epsilon = epsilon();

  sim::CarState state = sim::reset(env_.track, config_.seed);
  Observation obs = sim::observe(state, env_.track, env_.vehicle);
  noise_.reset();
  sim::MetricsAccumulator acc(env_.track.half_width());
  for (;;) {
    const Action action = ddpg::actor_forward(agent_, obs, false, noise_, noise_rng_, epsilon());
    const auto out = sim::step(env_, state, action);
    buffer_.push({obs, action, config_.reward_scale * out.result.reward, out.result.observation,
                  is_failure(out.result.reason)});
    ++total_steps_;
    if (buffer_.size() >= config_.warmup && buffer_.size() >= config_.batch_size) {
      const auto batch = buffer_.sample(config_.batch_size);
      ddpg::train_on_batch(agent_, batch);
      ++updates_;
    }
    acc.add(out.result, out.state);
    if (observer) observer({out.result, out.state});
    state = out.state;
    obs = out.result.observation;
    if (out.result.terminal) {
      row.termination = out.result.reason;
      break;
    }
  }
  row.metrics = acc.finish();
  ++episodes_completed_;
  return row;
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint c;
  c.config = config_;
  c.agent = agent_;
  c.episodes_completed = episodes_completed_;
  c.total_steps = total_steps_;
  c.root_rng = root_rng_;
  c.noise_rng = noise_rng_;
  c.buffer_rng = buffer_.rng();
  c.noise_state = noise_.state();
  c.replay_capacity = buffer_.capacity();
  c.replay = buffer_.contents();
  return c;
}

TrainSummary train(const TrainConfig& config, const std::filesystem::path& output_dir) {
  Trainer trainer(config);

  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + output_dir.string() + ": " + ec.message());

  TrainSummary summary;
  summary.metrics_path = output_dir / "metrics.csv";
  summary.final_checkpoint = output_dir / "checkpoint_final.ckpt";
  std::ofstream metrics(summary.metrics_path, std::ios::trunc);
  if (!metrics) throw IoError("cannot write " + summary.metrics_path.string());
  metrics << kMetricsHeader << '\n' << std::flush;

  while (trainer.episodes_completed() < config.episodes) {
    EpisodeRow row;
    try {
      row = trainer.run_episode();
    } catch (const TrainingError&) {
      save_checkpoint(trainer.checkpoint(), output_dir / "checkpoint_diagnostic.ckpt");
      throw;
    }
    metrics << format_metrics_row(row) << '\n' << std::flush;
    summary.rows.push_back(row);
    if (trainer.episodes_completed() % config.checkpoint_interval == 0)
      save_checkpoint(trainer.checkpoint(),
                      output_dir / ("checkpoint_ep" + std::to_string(trainer.episodes_completed()) + ".ckpt"));
  }
  if (!metrics) throw IoError("failed writing " + summary.metrics_path.string());
  save_checkpoint(trainer.checkpoint(), summary.final_checkpoint);
  return summary;
}

std::vector<EpisodeRow> evaluate(const Checkpoint& checkpoint, const std::string& track,
                                 const EvalOptions& options, const StepObserver& observer) {
  if (checkpoint.version != kCheckpointVersion) throw FormatError("version", "unsupported checkpoint version");
  TrainConfig config = checkpoint.config;
  if (options.max_steps != 0) config.max_steps = options.max_steps;
  const sim::Environment env = make_environment(config, track);
  const ddpg::DdpgAgent& agent = checkpoint.agent;

  ddpg::OuNoise noise(config.ou);
  noise.set_state(checkpoint.noise_state);
  Rng noise_rng = checkpoint.noise_rng;
  std::uint64_t steps = checkpoint.total_steps;

  std::vector<EpisodeRow> rows;
  for (std::uint64_t e = 0; e < options.episodes; ++e) {
    EpisodeRow row;
    row.episode = checkpoint.episodes_completed + e;
    row.epsilon = options.noise ? epsilon_at(config, steps) : 0.0;
    sim::CarState state = sim::reset(env.track, config.seed);
    Observation obs = sim::observe(state, env.track, env.vehicle);
    noise.reset();
    sim::MetricsAccumulator acc(env.track.half_width());
    for (;;) {
      const Action action = options.noise
                                ? ddpg::actor_forward(agent, obs, false, noise, noise_rng, epsilon_at(config, steps))
                                : ddpg::policy(agent.actor, obs);
      const auto out = sim::step(env, state, action);
      ++steps;
      acc.add(out.result, out.state);
      if (observer) observer({out.result, out.state});
      state = out.state;
      obs = out.result.observation;
      if (out.result.terminal) {
        row.termination = out.result.reason;
        break;
      }
    }
    row.metrics = acc.finish();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace drivepg::harness
