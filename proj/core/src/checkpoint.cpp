#include "drivepg/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "drivepg/errors.hpp"

namespace drivepg::harness {

namespace {

constexpr char kMagic[4] = {'D', 'D', 'P', 'G'};
constexpr std::size_t kRecordSize = 2 * kObservationSize + kActionSize + 2;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }

  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }
  void arr(const double* p, std::size_t n) {
    u64(n);
    for (std::size_t i = 0; i < n; ++i) f64(p[i]);
  }

  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  void need(std::size_t n, const std::string& field) const {
    if (in_.size() - pos_ < n) throw FormatError(field, "file truncated");
  }
  std::uint8_t u8(const std::string& field) {
    need(1, field);
    return static_cast<std::uint8_t>(in_[pos_++]);
  }
  std::uint32_t u32(const std::string& field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(in_[pos_++])) << (8 * i);
    return v;
  }
  std::uint64_t u64(const std::string& field) {
    need(8, field);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(in_[pos_++])) << (8 * i);
    return v;
  }
  double f64(const std::string& field) { return std::bit_cast<double>(u64(field)); }
  std::string str(const std::string& field) {
    const std::uint64_t n = u64(field + ".length");
    need(n, field);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  /// Reads an array whose length must equal `expected`.
  void arr(double* p, std::size_t expected, const std::string& field) {
    const std::uint64_t n = u64(field + ".length");
    if (n != expected)
      throw FormatError(field, "length " + std::to_string(n) + ", expected " + std::to_string(expected));
    need(n * 8, field);
    for (std::size_t i = 0; i < n; ++i) p[i] = f64(field);
  }
  std::vector<double> arr_any(const std::string& field) {
    const std::uint64_t n = u64(field + ".length");
    if (n > (in_.size() - pos_) / 8) throw FormatError(field, "file truncated");
    std::vector<double> v(n);
    for (auto& x : v) x = f64(field);
    return v;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

void write_net(Writer& w, const nn::Mlp& net) {
  w.u32(static_cast<std::uint32_t>(net.layers.size()));
  for (const auto& l : net.layers) {
    w.u32(static_cast<std::uint32_t>(l.weights.rows()));
    w.u32(static_cast<std::uint32_t>(l.weights.cols()));
    w.u8(static_cast<std::uint8_t>(l.activation));
    w.arr(l.weights.data(), static_cast<std::size_t>(l.weights.size()));
    w.arr(l.biases.data(), static_cast<std::size_t>(l.biases.size()));
  }
}

nn::Mlp read_net(Reader& r, const std::string& name) {
  nn::Mlp net;
  const std::uint32_t layers = r.u32(name + ".layers");
  if (layers == 0 || layers > 64) throw FormatError(name + ".layers", "implausible layer count");
  net.layers.resize(layers);
  for (std::uint32_t i = 0; i < layers; ++i) {
    const std::string f = name + ".layer" + std::to_string(i);
    auto& l = net.layers[i];
    const std::uint32_t rows = r.u32(f + ".rows");
    const std::uint32_t cols = r.u32(f + ".cols");
    const std::uint8_t act = r.u8(f + ".activation");
    if (act > static_cast<std::uint8_t>(nn::Activation::Linear)) throw FormatError(f + ".activation", "unknown activation");
    if (rows == 0 || cols == 0) throw FormatError(f + ".rows", "empty layer");
    r.need(static_cast<std::size_t>(rows) * cols * 8, f + ".weights");
    l.activation = static_cast<nn::Activation>(act);
    l.weights.resize(rows, cols);
    l.biases.resize(rows);
    r.arr(l.weights.data(), static_cast<std::size_t>(l.weights.size()), f + ".weights");
    r.arr(l.biases.data(), static_cast<std::size_t>(l.biases.size()), f + ".biases");
  }
  try {
    net.validate();
  } catch (const ConfigurationError& e) {
    throw FormatError(name, e.what());
  }
  return net;
}

void write_opt(Writer& w, const nn::AdamState& s) {
  w.u64(s.step_count);
  w.f64(s.hyper.learning_rate);
  w.f64(s.hyper.beta1);
  w.f64(s.hyper.beta2);
  w.f64(s.hyper.epsilon);
  for (std::size_t i = 0; i < s.first_moment.size(); ++i) {
    const auto& m = s.first_moment[i];
    const auto& v = s.second_moment[i];
    w.arr(m.weights.data(), static_cast<std::size_t>(m.weights.size()));
    w.arr(m.biases.data(), static_cast<std::size_t>(m.biases.size()));
    w.arr(v.weights.data(), static_cast<std::size_t>(v.weights.size()));
    w.arr(v.biases.data(), static_cast<std::size_t>(v.biases.size()));
  }
}

nn::AdamState read_opt(Reader& r, const nn::Mlp& net, const std::string& name) {
  nn::AdamState s;
  s.step_count = r.u64(name + ".step_count");
  s.hyper.learning_rate = r.f64(name + ".learning_rate");
  s.hyper.beta1 = r.f64(name + ".beta1");
  s.hyper.beta2 = r.f64(name + ".beta2");
  s.hyper.epsilon = r.f64(name + ".epsilon");
  s.first_moment = nn::zero_gradients(net);
  s.second_moment = nn::zero_gradients(net);
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const std::string f = name + ".layer" + std::to_string(i);
    auto& m = s.first_moment[i];
    auto& v = s.second_moment[i];
    r.arr(m.weights.data(), static_cast<std::size_t>(m.weights.size()), f + ".m.weights");
    r.arr(m.biases.data(), static_cast<std::size_t>(m.biases.size()), f + ".m.biases");
    r.arr(v.weights.data(), static_cast<std::size_t>(v.weights.size()), f + ".v.weights");
    r.arr(v.biases.data(), static_cast<std::size_t>(v.biases.size()), f + ".v.biases");
  }
  return s;
}

void same_shape(const nn::Mlp& a, const nn::Mlp& b, const std::string& field) {
  bool ok = a.layers.size() == b.layers.size();
  for (std::size_t i = 0; ok && i < a.layers.size(); ++i)
    ok = a.layers[i].weights.rows() == b.layers[i].weights.rows() &&
         a.layers[i].weights.cols() == b.layers[i].weights.cols() &&
         a.layers[i].activation == b.layers[i].activation;
  if (!ok) throw FormatError(field, "target network shape differs from the online network");
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& c) {
  Writer w;
  w.bytes(kMagic, 4);
  w.u32(c.version);
  w.str(format_config(c.config));
  w.u64(c.episodes_completed);
  w.u64(c.total_steps);
  w.str(serialize_rng(c.root_rng));
  w.str(serialize_rng(c.noise_rng));
  w.str(serialize_rng(c.buffer_rng));
  const auto& a = c.agent;
  write_net(w, a.actor);
  write_net(w, a.critic.state_path);
  write_net(w, a.critic.merged);
  write_net(w, a.target_actor);
  write_net(w, a.target_critic.state_path);
  write_net(w, a.target_critic.merged);
  write_opt(w, a.actor_optimizer);
  write_opt(w, a.critic_optimizer.state_path);
  write_opt(w, a.critic_optimizer.merged);
  w.f64(a.gamma);
  w.f64(a.tau);
  w.arr(c.noise_state.data(), c.noise_state.size());
  w.u64(c.replay_capacity);
  std::vector<double> records;
  records.reserve(c.replay.size() * kRecordSize);
  for (const auto& e : c.replay) {
    const auto s = e.state.to_array();
    const auto act = e.action.to_array();
    const auto n = e.next_state.to_array();
    records.insert(records.end(), s.begin(), s.end());
    records.insert(records.end(), act.begin(), act.end());
    records.push_back(e.reward);
    records.insert(records.end(), n.begin(), n.end());
    records.push_back(e.terminal ? 1.0 : 0.0);
  }
  w.arr(records.data(), records.size());
  return w.take();
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  r.need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("magic", "not a checkpoint file");
  for (int i = 0; i < 4; ++i) r.u8("magic");

  Checkpoint c;
  c.version = r.u32("version");
  if (c.version != kCheckpointVersion)
    throw FormatError("version", "unsupported version " + std::to_string(c.version) + ", expected " +
                                     std::to_string(kCheckpointVersion));
  const std::string config_text = r.str("config");
  try {
    c.config = parse_config(config_text);
  } catch (const ConfigurationError& e) {
    throw FormatError("config", e.what());
  }
  c.episodes_completed = r.u64("episodes_completed");
  c.total_steps = r.u64("total_steps");
  c.root_rng = deserialize_rng(r.str("rng.root"));
  c.noise_rng = deserialize_rng(r.str("rng.noise"));
  c.buffer_rng = deserialize_rng(r.str("rng.buffer"));
  auto& a = c.agent;
  a.actor = read_net(r, "actor");
  a.critic.state_path = read_net(r, "critic.state_path");
  a.critic.merged = read_net(r, "critic.merged");
  a.target_actor = read_net(r, "target_actor");
  a.target_critic.state_path = read_net(r, "target_critic.state_path");
  a.target_critic.merged = read_net(r, "target_critic.merged");
  same_shape(a.actor, a.target_actor, "target_actor");
  same_shape(a.critic.state_path, a.target_critic.state_path, "target_critic.state_path");
  same_shape(a.critic.merged, a.target_critic.merged, "target_critic.merged");
  if (a.actor.input_size() != kObservationSize || a.actor.output_size() != kActionSize)
    throw FormatError("actor", "wrong input or output size");
  if (a.critic.state_path.input_size() != kObservationSize ||
      a.critic.merged.input_size() != a.critic.state_path.output_size() + kActionSize ||
      a.critic.merged.output_size() != 1)
    throw FormatError("critic", "inconsistent critic shape");
  a.actor_optimizer = read_opt(r, a.actor, "opt.actor");
  a.critic_optimizer.state_path = read_opt(r, a.critic.state_path, "opt.critic.state_path");
  a.critic_optimizer.merged = read_opt(r, a.critic.merged, "opt.critic.merged");
  a.gamma = r.f64("gamma");
  a.tau = r.f64("tau");
  r.arr(c.noise_state.data(), c.noise_state.size(), "noise_state");
  c.replay_capacity = r.u64("replay.capacity");
  const std::vector<double> records = r.arr_any("replay.records");
  if (records.size() % kRecordSize != 0) throw FormatError("replay.records", "partial record");
  const std::size_t count = records.size() / kRecordSize;
  if (count > c.replay_capacity) throw FormatError("replay.records", "more records than capacity");
  c.replay.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double* p = records.data() + k * kRecordSize;
    std::array<double, kObservationSize> s{};
    std::array<double, kObservationSize> n{};
    std::copy_n(p, kObservationSize, s.begin());
    p += kObservationSize;
    auto& e = c.replay[k];
    e.action = Action{p[0], p[1], p[2]};
    p += kActionSize;
    e.reward = *p++;
    std::copy_n(p, kObservationSize, n.begin());
    p += kObservationSize;
    e.terminal = *p != 0.0;
    e.state = Observation::from_array(s);
    e.next_state = Observation::from_array(n);
  }
  if (!r.done()) throw FormatError("trailer", "unexpected bytes after the replay records");
  return c;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const std::string bytes = encode_checkpoint(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_checkpoint(buf.str());
}

}  // namespace drivepg::harness
