// Command-line front end: train, eval, tracks list.
//
// Exit codes: 0 success, 1 usage, 2 configuration, 3 runtime or numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "drivepg/checkpoint.hpp"
#include "drivepg/config.hpp"
#include "drivepg/errors.hpp"
#include "drivepg/track.hpp"
#include "drivepg/trainer.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kRuntime = 3 };

void print_row(const drivepg::harness::EpisodeRow& row) {
  std::printf("episode %llu: steps=%llu reward=%.2f distance=%.1fm mean_speed=%.1fkm/h gain=%.3f var=%.3f (%s)\n",
              static_cast<unsigned long long>(row.episode),
              static_cast<unsigned long long>(row.metrics.steps), row.metrics.total_reward,
              row.metrics.total_distance_m, row.metrics.mean_speed_kmh, row.metrics.mean_step_gain,
              row.metrics.var_dist_center_m2, drivepg::sim::to_string(row.termination));
}

int run_train(const std::string& config_path, std::optional<std::uint64_t> seed,
              std::optional<std::string> out) {
  auto config = drivepg::harness::load_config(config_path);
  if (seed) config.seed = *seed;
  if (out) config.output_dir = *out;
  config.validate();
  const auto summary = drivepg::harness::train(config, config.output_dir);
  for (const auto& row : summary.rows) print_row(row);
  std::printf("metrics: %s\ncheckpoint: %s\n", summary.metrics_path.c_str(), summary.final_checkpoint.c_str());
  return kOk;
}

int run_eval(const std::string& checkpoint_path, const std::string& track, std::uint64_t episodes,
             std::optional<std::uint64_t> seed, const std::string& out, std::uint64_t max_steps, bool noise) {
  auto checkpoint = drivepg::harness::load_checkpoint(checkpoint_path);
  if (seed) checkpoint.config.seed = *seed;
  drivepg::harness::EvalOptions options;
  options.episodes = episodes;
  options.max_steps = max_steps;
  options.noise = noise;
  const auto rows = drivepg::harness::evaluate(checkpoint, track, options);

  std::filesystem::create_directories(out);
  const auto path = std::filesystem::path(out) / "eval_metrics.csv";
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw drivepg::IoError("cannot write " + path.string());
  drivepg::harness::write_metrics(file, rows);
  for (const auto& row : rows) print_row(row);
  std::printf("metrics: %s\n", path.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DDPG driving agent: train and evaluate on a 2D track simulator", "drive-ddpg"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> train_seed;
  std::optional<std::string> train_out;
  auto* train = app.add_subcommand("train", "Train an agent from a key=value config file");
  train->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  train->add_option("--seed", train_seed, "Override the config seed");
  train->add_option("--out", train_out, "Override the output directory");

  std::string checkpoint_path;
  std::string eval_track;
  std::uint64_t eval_episodes = 1;
  std::optional<std::uint64_t> eval_seed;
  std::string eval_out = ".";
  std::uint64_t eval_max_steps = 0;
  bool eval_noise = false;
  auto* eval = app.add_subcommand("eval", "Roll out a checkpointed policy without learning");
  eval->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required()->check(CLI::ExistingFile);
  eval->add_option("--track", eval_track, "Built-in track name or track file")->required();
  eval->add_option("--episodes", eval_episodes, "Number of episodes")->required();
  eval->add_option("--seed", eval_seed, "Override the checkpoint seed");
  eval->add_option("--out", eval_out, "Directory for eval_metrics.csv");
  eval->add_option("--max-steps", eval_max_steps, "Episode step cap (default: the checkpoint's)");
  eval->add_flag("--noise", eval_noise, "Act with the checkpoint's exploration noise");

  auto* tracks = app.add_subcommand("tracks", "Track utilities");
  tracks->require_subcommand(1);
  auto* tracks_list = tracks->add_subcommand("list", "List built-in tracks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*train) return run_train(config_path, train_seed, train_out);
    if (*eval)
      return run_eval(checkpoint_path, eval_track, eval_episodes, eval_seed, eval_out, eval_max_steps, eval_noise);
    if (*tracks_list) {
      for (const auto& name : drivepg::sim::builtin_track_names()) {
        const auto t = drivepg::sim::builtin_track(name);
        std::printf("%-10s length=%.1fm half_width=%.1fm points=%zu\n", name.c_str(), t.length(), t.half_width(),
                    t.segment_count());
      }
      return kOk;
    }
  } catch (const drivepg::ConfigurationError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfig;
  } catch (const drivepg::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntime;
  }
  return kUsage;
}
