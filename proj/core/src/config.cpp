#include "drivepg/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "drivepg/errors.hpp"

namespace drivepg::harness {

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw ConfigurationError("config key '" + key + "': '" + value + "' is not " + expected);
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end || value.empty()) bad_value(key, value, "a number");
  return v;
}

std::uint64_t to_count(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end || value.empty()) bad_value(key, value, "a non-negative integer");
  return v;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(trim(item));
  return out;
}

std::array<double, kActionSize> to_triple(const std::string& key, const std::string& value) {
  const auto items = split_list(value);
  if (items.size() != kActionSize) bad_value(key, value, "three comma-separated numbers");
  return {to_double(key, items[0]), to_double(key, items[1]), to_double(key, items[2])};
}

std::string triple_text(const std::array<double, kActionSize>& t) {
  return format_double(t[0]) + "," + format_double(t[1]) + "," + format_double(t[2]);
}

using Setter = std::function<void(TrainConfig&, const std::string& key, const std::string& value)>;
using Getter = std::function<std::string(const TrainConfig&)>;

struct Field {
  const char* key;
  Setter set;
  Getter get;
};

template <typename T>
Field count_field(const char* key, T TrainConfig::*member) {
  return {key,
          [member](TrainConfig& c, const std::string& k, const std::string& v) {
            c.*member = static_cast<T>(to_count(k, v));
          },
          [member](const TrainConfig& c) { return std::to_string(c.*member); }};
}

Field real_field(const char* key, double TrainConfig::*member) {
  return {key,
          [member](TrainConfig& c, const std::string& k, const std::string& v) { c.*member = to_double(k, v); },
          [member](const TrainConfig& c) { return format_double(c.*member); }};
}

/// Fixed order; also the order of format_config output.
const std::vector<Field>& fields() {
  static const std::vector<Field> all = {
      {"track", [](TrainConfig& c, const std::string&, const std::string& v) { c.track = v; },
       [](const TrainConfig& c) { return c.track; }},
      count_field("episodes", &TrainConfig::episodes),
      count_field("max_steps", &TrainConfig::max_steps),
      count_field("buffer_capacity", &TrainConfig::buffer_capacity),
      count_field("batch_size", &TrainConfig::batch_size),
      real_field("gamma", &TrainConfig::gamma),
      real_field("tau", &TrainConfig::tau),
      real_field("actor_lr", &TrainConfig::actor_lr),
      real_field("critic_lr", &TrainConfig::critic_lr),
      {"reward_alpha", [](TrainConfig& c, const std::string& k, const std::string& v) { c.reward.alpha = to_double(k, v); },
       [](const TrainConfig& c) { return format_double(c.reward.alpha); }},
      {"reward_beta", [](TrainConfig& c, const std::string& k, const std::string& v) { c.reward.beta = to_double(k, v); },
       [](const TrainConfig& c) { return format_double(c.reward.beta); }},
      {"reward_gamma", [](TrainConfig& c, const std::string& k, const std::string& v) { c.reward.gamma = to_double(k, v); },
       [](const TrainConfig& c) { return format_double(c.reward.gamma); }},
      real_field("reward_scale", &TrainConfig::reward_scale),
      {"ou_theta", [](TrainConfig& c, const std::string& k, const std::string& v) { c.ou.theta = to_triple(k, v); },
       [](const TrainConfig& c) { return triple_text(c.ou.theta); }},
      {"ou_mu", [](TrainConfig& c, const std::string& k, const std::string& v) { c.ou.mu = to_triple(k, v); },
       [](const TrainConfig& c) { return triple_text(c.ou.mu); }},
      {"ou_sigma", [](TrainConfig& c, const std::string& k, const std::string& v) { c.ou.sigma = to_triple(k, v); },
       [](const TrainConfig& c) { return triple_text(c.ou.sigma); }},
      {"ou_dt", [](TrainConfig& c, const std::string& k, const std::string& v) { c.ou.dt = to_double(k, v); },
       [](const TrainConfig& c) { return format_double(c.ou.dt); }},
      count_field("epsilon_decay_steps", &TrainConfig::epsilon_decay_steps),
      count_field("warmup", &TrainConfig::warmup),
      count_field("seed", &TrainConfig::seed),
      count_field("checkpoint_interval", &TrainConfig::checkpoint_interval),
      {"output_dir", [](TrainConfig& c, const std::string&, const std::string& v) { c.output_dir = v; },
       [](const TrainConfig& c) { return c.output_dir; }},
      {"actor_hidden",
       [](TrainConfig& c, const std::string& k, const std::string& v) {
         c.actor_hidden.clear();
         for (const auto& item : split_list(v)) c.actor_hidden.push_back(static_cast<std::size_t>(to_count(k, item)));
       },
       [](const TrainConfig& c) {
         std::string s;
         for (std::size_t i = 0; i < c.actor_hidden.size(); ++i)
           s += (i ? "," : "") + std::to_string(c.actor_hidden[i]);
         return s;
       }},
      count_field("critic_state_width", &TrainConfig::critic_state_width),
      count_field("critic_merge_width", &TrainConfig::critic_merge_width),
      count_field("critic_hidden_width", &TrainConfig::critic_hidden_width),
      real_field("dt", &TrainConfig::dt),
  };
  return all;
}

}  // namespace

void TrainConfig::validate() const {
  auto positive = [](std::uint64_t v, const char* key) {
    if (v == 0) throw ConfigurationError(std::string("config key '") + key + "' must be positive");
  };
  if (track.empty()) throw ConfigurationError("config key 'track' is empty");
  positive(max_steps, "max_steps");
  positive(buffer_capacity, "buffer_capacity");
  positive(batch_size, "batch_size");
  positive(epsilon_decay_steps, "epsilon_decay_steps");
  positive(checkpoint_interval, "checkpoint_interval");
  positive(critic_state_width, "critic_state_width");
  positive(critic_merge_width, "critic_merge_width");
  positive(critic_hidden_width, "critic_hidden_width");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigurationError("config key 'gamma' must lie in (0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigurationError("config key 'tau' must lie in (0, 1]");
  if (!(actor_lr > 0.0)) throw ConfigurationError("config key 'actor_lr' must be positive");
  if (!(critic_lr > 0.0)) throw ConfigurationError("config key 'critic_lr' must be positive");
  if (!reward.valid()) throw ConfigurationError("reward weights must be finite and non-negative");
  if (!(reward_scale > 0.0) || !std::isfinite(reward_scale))
    throw ConfigurationError("config key 'reward_scale' must be positive");
  if (!(ou.dt > 0.0)) throw ConfigurationError("config key 'ou_dt' must be positive");
  for (std::size_t i = 0; i < kActionSize; ++i)
    if (!(ou.theta[i] >= 0.0) || !(ou.sigma[i] >= 0.0) || !std::isfinite(ou.mu[i]))
      throw ConfigurationError("OU parameters must be finite with non-negative theta and sigma");
  if (batch_size > buffer_capacity)
    throw ConfigurationError("config key 'batch_size' exceeds 'buffer_capacity'");
  if (actor_hidden.empty()) throw ConfigurationError("config key 'actor_hidden' is empty");
  for (std::size_t w : actor_hidden)
    if (w == 0) throw ConfigurationError("config key 'actor_hidden' has a zero width");
  if (!(dt > 0.0)) throw ConfigurationError("config key 'dt' must be positive");
}

ddpg::AgentConfig TrainConfig::agent_config() const {
  ddpg::AgentConfig a;
  a.shape.actor_hidden = actor_hidden;
  a.shape.critic_state_width = critic_state_width;
  a.shape.critic_merge_width = critic_merge_width;
  a.shape.critic_hidden_width = critic_hidden_width;
  a.gamma = gamma;
  a.tau = tau;
  a.actor_lr = actor_lr;
  a.critic_lr = critic_lr;
  return a;
}

TrainConfig parse_config(std::string_view text) {
  std::map<std::string, const Field*> by_key;
  for (const auto& f : fields()) by_key[f.key] = &f;

  TrainConfig config;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigurationError("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = by_key.find(key);
    if (it == by_key.end())
      throw ConfigurationError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw ConfigurationError("config line " + std::to_string(line_no) + ": repeated key '" + key + "'");
    it->second->set(config, key, value);
  }
  config.validate();
  return config;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const TrainConfig& config) {
  std::string out;
  for (const auto& f : fields()) out += std::string(f.key) + "=" + f.get(config) + "\n";
  return out;
}

}  // namespace drivepg::harness
