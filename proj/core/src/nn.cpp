#include "drivepg/nn.hpp"

#include <cmath>
#include <string>

#include "drivepg/errors.hpp"

namespace drivepg::nn {

const char* to_string(Activation a) {
  switch (a) {
    case Activation::ReLU: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Linear: return "linear";
  }
  return "unknown";
}

Batch activate(Activation a, const Batch& pre) {
  switch (a) {
    case Activation::ReLU: return pre.cwiseMax(0.0);
    case Activation::Tanh: return pre.array().tanh().matrix();
    case Activation::Sigmoid:
      return pre.unaryExpr([](double z) {
        // Split on sign so exp never overflows.
        if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
        const double e = std::exp(z);
        return e / (1.0 + e);
      });
    case Activation::Linear: return pre;
  }
  return pre;
}

Batch activation_derivative(Activation a, const Batch& pre, const Batch& post) {
  switch (a) {
    case Activation::ReLU:
      return pre.unaryExpr([](double z) { return z > 0.0 ? 1.0 : 0.0; });
    case Activation::Tanh: return (1.0 - post.array().square()).matrix();
    case Activation::Sigmoid: return (post.array() * (1.0 - post.array())).matrix();
    case Activation::Linear: return Batch::Ones(pre.rows(), pre.cols());
  }
  return Batch::Ones(pre.rows(), pre.cols());
}

std::size_t Mlp::input_size() const { return layers.empty() ? 0 : layers.front().inputs(); }

std::size_t Mlp::output_size() const { return layers.empty() ? 0 : layers.back().outputs(); }

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.biases.size());
  return n;
}

void Mlp::validate() const {
  if (layers.empty()) throw ConfigurationError("network has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.weights.rows() == 0 || l.weights.cols() == 0)
      throw ConfigurationError("layer " + std::to_string(i) + " has an empty weight matrix");
    if (l.biases.size() != l.weights.rows())
      throw ConfigurationError("layer " + std::to_string(i) + ": bias length " +
                               std::to_string(l.biases.size()) + " != " +
                               std::to_string(l.weights.rows()) + " outputs");
    if (i > 0 && l.inputs() != layers[i - 1].outputs())
      throw ConfigurationError("layer " + std::to_string(i) + " expects " +
                               std::to_string(l.inputs()) + " inputs but layer " +
                               std::to_string(i - 1) + " produces " +
                               std::to_string(layers[i - 1].outputs()));
  }
}

bool operator==(const Mlp& a, const Mlp& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    const auto& x = a.layers[i];
    const auto& y = b.layers[i];
    if (x.activation != y.activation || x.weights.rows() != y.weights.rows() ||
        x.weights.cols() != y.weights.cols() || x.biases.size() != y.biases.size())
      return false;
    if (x.weights != y.weights || x.biases != y.biases) return false;
  }
  return true;
}

namespace {

void check_input(const Mlp& net, Eigen::Index rows) {
  if (net.layers.empty()) throw ConfigurationError("network has no layers");
  if (static_cast<std::size_t>(rows) != net.input_size())
    throw ConfigurationError("input has " + std::to_string(rows) + " rows, network expects " +
                             std::to_string(net.input_size()));
}

}  // namespace

Batch forward(const Mlp& net, const Batch& input, ForwardCache& cache) {
  check_input(net, input.rows());
  const std::size_t n = net.layers.size();
  cache.source = &net;
  cache.inputs.resize(n);
  cache.activations.resize(n);
  cache.outputs.resize(n);
  const Batch* x = &input;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& layer = net.layers[i];
    cache.inputs[i] = *x;
    Batch& z = cache.activations[i];
    z.noalias() = layer.weights * (*x);
    z.colwise() += layer.biases;
    cache.outputs[i] = activate(layer.activation, z);
    x = &cache.outputs[i];
  }
  return cache.outputs.back();
}

Batch predict(const Mlp& net, const Batch& input) {
  check_input(net, input.rows());
  Batch x = input;
  for (const auto& layer : net.layers) {
    Batch z;
    z.noalias() = layer.weights * x;
    z.colwise() += layer.biases;
    x = activate(layer.activation, z);
  }
  return x;
}

Vector forward(const Mlp& net, const Vector& input, ForwardCache& cache) {
  const Batch in = input;
  return forward(net, in, cache).col(0);
}

BackwardResult backward(const Mlp& net, const ForwardCache& cache, const Batch& output_gradient,
                        BackwardOptions options) {
  const std::size_t n = net.layers.size();
  if (cache.source != &net) throw UsageError("forward cache was produced by a different network");
  if (cache.inputs.size() != n || cache.activations.size() != n || cache.outputs.size() != n)
    throw UsageError("forward cache layer count does not match the network");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = net.layers[i];
    if (static_cast<std::size_t>(cache.inputs[i].rows()) != l.inputs() ||
        static_cast<std::size_t>(cache.activations[i].rows()) != l.outputs())
      throw UsageError("forward cache shape does not match layer " + std::to_string(i));
  }
  if (static_cast<std::size_t>(output_gradient.rows()) != net.output_size())
    throw UsageError("output gradient has " + std::to_string(output_gradient.rows()) +
                     " rows, network produces " + std::to_string(net.output_size()));
  if (static_cast<std::size_t>(output_gradient.cols()) != cache.batch_size())
    throw UsageError("output gradient batch size does not match the cached forward pass");

  BackwardResult result;
  if (options.parameters) result.parameters.resize(n);
  Batch upstream = output_gradient;
  for (std::size_t k = n; k-- > 0;) {
    const auto& layer = net.layers[k];
    Batch delta = layer.activation == Activation::Linear
                      ? std::move(upstream)
                      : upstream.cwiseProduct(activation_derivative(layer.activation, cache.activations[k],
                                                                    cache.outputs[k]));
    if (options.parameters) {
      auto& g = result.parameters[k];
      g.weights.noalias() = delta * cache.inputs[k].transpose();
      g.biases = delta.rowwise().sum();
    }
    if (k > 0 || options.input) {
      upstream.resize(layer.weights.cols(), delta.cols());
      upstream.noalias() = layer.weights.transpose() * delta;
    }
  }
  if (options.input) result.input_gradient = std::move(upstream);
  return result;
}

BackwardResult backward(const Mlp& net, const ForwardCache& cache, const Vector& output_gradient) {
  const Batch g = output_gradient;
  return backward(net, cache, g);
}

Gradients zero_gradients(const Mlp& net) {
  Gradients g(net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& l = net.layers[i];
    g[i].weights = Matrix::Zero(l.weights.rows(), l.weights.cols());
    g[i].biases = Vector::Zero(l.biases.size());
  }
  return g;
}

void scale(Gradients& grads, double factor) {
  for (auto& g : grads) {
    g.weights *= factor;
    g.biases *= factor;
  }
}

void accumulate(Gradients& a, const Gradients& b) {
  if (a.size() != b.size()) throw UsageError("gradient layer counts differ");
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i].weights += b[i].weights;
    a[i].biases += b[i].biases;
  }
}

bool all_finite(const Mlp& net) {
  for (const auto& l : net.layers)
    if (!l.weights.allFinite() || !l.biases.allFinite()) return false;
  return true;
}

std::vector<double> flatten(const Mlp& net) {
  std::vector<double> out;
  out.reserve(net.parameter_count());
  for (const auto& l : net.layers) {
    out.insert(out.end(), l.weights.data(), l.weights.data() + l.weights.size());
    out.insert(out.end(), l.biases.data(), l.biases.data() + l.biases.size());
  }
  return out;
}

std::vector<double> flatten(const Gradients& grads) {
  std::vector<double> out;
  for (const auto& g : grads) {
    out.insert(out.end(), g.weights.data(), g.weights.data() + g.weights.size());
    out.insert(out.end(), g.biases.data(), g.biases.data() + g.biases.size());
  }
  return out;
}

void unflatten(Mlp& net, std::span<const double> values) {
  if (values.size() != net.parameter_count())
    throw UsageError("flat parameter vector has " + std::to_string(values.size()) +
                     " values, network has " + std::to_string(net.parameter_count()));
  std::size_t at = 0;
  for (auto& l : net.layers) {
    std::copy_n(values.data() + at, l.weights.size(), l.weights.data());
    at += static_cast<std::size_t>(l.weights.size());
    std::copy_n(values.data() + at, l.biases.size(), l.biases.data());
    at += static_cast<std::size_t>(l.biases.size());
  }
}

Mlp init_network(std::span<const std::size_t> layer_sizes,
                 std::span<const Activation> activations, Rng& rng, InitOptions options) {
  if (layer_sizes.size() < 2) throw ConfigurationError("network needs an input size and at least one layer");
  const std::size_t n = layer_sizes.size() - 1;
  if (activations.size() != n)
    throw ConfigurationError("expected " + std::to_string(n) + " activations, got " +
                             std::to_string(activations.size()));
  for (std::size_t s : layer_sizes)
    if (s == 0) throw ConfigurationError("layer sizes must be positive");

  Mlp net;
  net.layers.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t fan_in = layer_sizes[i];
    const std::size_t fan_out = layer_sizes[i + 1];
    const double bound = (i + 1 == n && options.small_final_layer) ? options.final_layer_bound
                                      : 1.0 / std::sqrt(static_cast<double>(fan_in));
    auto& layer = net.layers[i];
    layer.activation = activations[i];
    layer.weights.resize(static_cast<Eigen::Index>(fan_out), static_cast<Eigen::Index>(fan_in));
    layer.biases.resize(static_cast<Eigen::Index>(fan_out));
    for (Eigen::Index k = 0; k < layer.weights.size(); ++k)
      layer.weights.data()[k] = uniform_real(rng, -bound, bound);
    for (Eigen::Index k = 0; k < layer.biases.size(); ++k)
      layer.biases[k] = uniform_real(rng, -bound, bound);
  }
  return net;
}

Mlp init_network(std::span<const std::size_t> layer_sizes,
                 std::span<const Activation> activations, std::uint64_t seed,
                 InitOptions options) {
  Rng rng(seed);
  return init_network(layer_sizes, activations, rng, options);
}

}  // namespace drivepg::nn
