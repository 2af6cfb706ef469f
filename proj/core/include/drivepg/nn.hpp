#pragma once

// Dense feedforward networks with exact reverse-mode gradients.
//
// Batched calls take one sample per column: an input batch for a network with
// `n` inputs is an `n x batch` matrix. Single-vector overloads wrap a batch of
// one. Parameter gradients from a batched backward pass are summed over the
// batch; callers scale them if they want a mean.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "drivepg/random.hpp"

namespace drivepg::nn {

/// Weight matrix, out x in, row-major.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
/// Column-per-sample activations.
using Batch = Eigen::MatrixXd;

enum class Activation { ReLU, Tanh, Sigmoid, Linear };

const char* to_string(Activation a);

/// Applies `a` element-wise.
Batch activate(Activation a, const Batch& pre);
/// d(post)/d(pre) element-wise, given both values. ReLU'(0) is 0.
Batch activation_derivative(Activation a, const Batch& pre, const Batch& post);

struct DenseLayer {
  Matrix weights;  // out x in
  Vector biases;   // out
  Activation activation = Activation::Linear;

  std::size_t inputs() const { return static_cast<std::size_t>(weights.cols()); }
  std::size_t outputs() const { return static_cast<std::size_t>(weights.rows()); }
};

struct Mlp {
  std::vector<DenseLayer> layers;

  std::size_t input_size() const;
  std::size_t output_size() const;
  std::size_t parameter_count() const;
  /// Throws ConfigurationError when layer shapes do not chain.
  void validate() const;

  friend bool operator==(const Mlp& a, const Mlp& b);
};

/// Per-layer values recorded by `forward` and consumed by `backward`.
struct ForwardCache {
  const Mlp* source = nullptr;
  std::vector<Batch> inputs;       // input to layer i
  std::vector<Batch> activations;  // pre-activation of layer i
  std::vector<Batch> outputs;      // post-activation of layer i

  std::size_t batch_size() const {
    return inputs.empty() ? 0 : static_cast<std::size_t>(inputs.front().cols());
  }
};

struct LayerGradient {
  Matrix weights;
  Vector biases;
};

/// Same layout as Mlp::layers. Also used for Adam moments.
using Gradients = std::vector<LayerGradient>;

struct BackwardResult {
  Gradients parameters;
  Batch input_gradient;
};

Batch forward(const Mlp& net, const Batch& input, ForwardCache& cache);
/// Forward pass without recording activations.
Batch predict(const Mlp& net, const Batch& input);
Vector forward(const Mlp& net, const Vector& input, ForwardCache& cache);

/// Which gradients a backward pass produces. Skipped parts come back empty.
struct BackwardOptions {
  bool parameters = true;
  bool input = true;
};

/// Backpropagates `output_gradient` (dL/d output, one column per sample)
/// through the pass recorded in `cache`. Throws UsageError if the cache was
/// produced by another network, has a different shape, or a different batch size.
BackwardResult backward(const Mlp& net, const ForwardCache& cache, const Batch& output_gradient,
                        BackwardOptions options = {});
BackwardResult backward(const Mlp& net, const ForwardCache& cache, const Vector& output_gradient);

Gradients zero_gradients(const Mlp& net);
void scale(Gradients& grads, double factor);
/// a += b
void accumulate(Gradients& a, const Gradients& b);
bool all_finite(const Mlp& net);

/// Parameters flattened as layer0.weights (row-major), layer0.biases, layer1...
std::vector<double> flatten(const Mlp& net);
std::vector<double> flatten(const Gradients& grads);
/// Inverse of flatten(net); the architecture of `net` is kept.
void unflatten(Mlp& net, std::span<const double> values);

/// Layer sizes are node counts including the input, so `{29, 300, 3}` builds
/// two layers. Hidden weights and biases are drawn uniformly from
/// +-1/sqrt(fan_in); the final layer from +-final_layer_bound, which keeps
/// initial outputs near zero.
struct InitOptions {
  double final_layer_bound = 3e-3;
  /// When false every layer, including the last, uses the fan-in bound.
  bool small_final_layer = true;
};

Mlp init_network(std::span<const std::size_t> layer_sizes,
                 std::span<const Activation> activations, Rng& rng,
                 InitOptions options = {});
Mlp init_network(std::span<const std::size_t> layer_sizes,
                 std::span<const Activation> activations, std::uint64_t seed,
                 InitOptions options = {});

}  // namespace drivepg::nn
