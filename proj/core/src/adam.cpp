#include "drivepg/adam.hpp"

#include <cmath>

#include "drivepg/errors.hpp"

namespace drivepg::nn {

AdamState AdamState::for_network(const Mlp& net, AdamHyperparameters hyper) {
  if (!(hyper.learning_rate > 0.0)) throw ConfigurationError("Adam learning rate must be positive");
  if (!(hyper.beta1 > 0.0 && hyper.beta1 < 1.0) || !(hyper.beta2 > 0.0 && hyper.beta2 < 1.0))
    throw ConfigurationError("Adam betas must lie in (0, 1)");
  if (!(hyper.epsilon > 0.0)) throw ConfigurationError("Adam epsilon must be positive");
  AdamState s;
  s.first_moment = zero_gradients(net);
  s.second_moment = zero_gradients(net);
  s.hyper = hyper;
  return s;
}

bool operator==(const AdamState& a, const AdamState& b) {
  auto same = [](const Gradients& x, const Gradients& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].weights.rows() != y[i].weights.rows() || x[i].weights.cols() != y[i].weights.cols() ||
          x[i].biases.size() != y[i].biases.size())
        return false;
      if (x[i].weights != y[i].weights || x[i].biases != y[i].biases) return false;
    }
    return true;
  };
  return a.step_count == b.step_count && a.hyper.learning_rate == b.hyper.learning_rate &&
         a.hyper.beta1 == b.hyper.beta1 && a.hyper.beta2 == b.hyper.beta2 &&
         a.hyper.epsilon == b.hyper.epsilon && same(a.first_moment, b.first_moment) &&
         same(a.second_moment, b.second_moment);
}

void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> first_moment, std::span<double> second_moment,
                 std::uint64_t step, const AdamHyperparameters& hyper) {
  if (grads.size() != params.size() || first_moment.size() != params.size() ||
      second_moment.size() != params.size())
    throw UsageError("Adam: parameter, gradient, and moment sizes differ");
  if (step == 0) throw UsageError("Adam: step index is 1-based");
  const double b1 = hyper.beta1;
  const double b2 = hyper.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
  const auto n = static_cast<Eigen::Index>(params.size());
  Eigen::Map<Eigen::ArrayXd> p(params.data(), n);
  Eigen::Map<const Eigen::ArrayXd> g(grads.data(), n);
  Eigen::Map<Eigen::ArrayXd> m(first_moment.data(), n);
  Eigen::Map<Eigen::ArrayXd> v(second_moment.data(), n);
  m = b1 * m + (1.0 - b1) * g;
  v = b2 * v + (1.0 - b2) * g.square();
  p -= hyper.learning_rate * (m / c1) / ((v / c2).sqrt() + hyper.epsilon);
}

namespace {

template <typename Dense>
std::span<double> span_of(Dense& d) {
  return {d.data(), static_cast<std::size_t>(d.size())};
}

template <typename Dense>
std::span<const double> cspan_of(const Dense& d) {
  return {d.data(), static_cast<std::size_t>(d.size())};
}

}  // namespace

void adam_step(Mlp& net, const Gradients& grads, AdamState& state) {
  const std::size_t n = net.layers.size();
  if (grads.size() != n || state.first_moment.size() != n || state.second_moment.size() != n)
    throw UsageError("Adam: gradient or moment layer count does not match the network");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = net.layers[i];
    auto shaped = [&](const LayerGradient& g) {
      return g.weights.rows() == l.weights.rows() && g.weights.cols() == l.weights.cols() &&
             g.biases.size() == l.biases.size();
    };
    if (!shaped(grads[i]) || !shaped(state.first_moment[i]) || !shaped(state.second_moment[i]))
      throw UsageError("Adam: shape mismatch at layer " + std::to_string(i));
    if (!grads[i].weights.allFinite() || !grads[i].biases.allFinite())
      throw TrainingError("non-finite gradient", i);
  }

  const std::uint64_t step = state.step_count + 1;
  for (std::size_t i = 0; i < n; ++i) {
    auto& l = net.layers[i];
    adam_update(span_of(l.weights), cspan_of(grads[i].weights), span_of(state.first_moment[i].weights),
                span_of(state.second_moment[i].weights), step, state.hyper);
    adam_update(span_of(l.biases), cspan_of(grads[i].biases), span_of(state.first_moment[i].biases),
                span_of(state.second_moment[i].biases), step, state.hyper);
  }
  state.step_count = step;
}

}  // namespace drivepg::nn
