#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "../support/gradient_check.hpp"
#include "drivepg/adam.hpp"
#include "drivepg/errors.hpp"
#include "drivepg/nn.hpp"

namespace drivepg::nn {
namespace {

DenseLayer make_layer(Matrix w, Vector b, Activation a) { return {std::move(w), std::move(b), a}; }

TEST(MlpForward, IdentityLinearLayer) {
  Mlp net{{make_layer(Matrix::Identity(2, 2), Vector::Zero(2), Activation::Linear)}};
  ForwardCache cache;
  const Vector out = forward(net, Vector{{1.0, 2.0}}, cache);
  EXPECT_EQ(out, (Vector{{1.0, 2.0}}));
}

TEST(MlpForward, ReluClipsNegatives) {
  Mlp net{{make_layer(Matrix::Identity(2, 2), Vector::Zero(2), Activation::ReLU)}};
  ForwardCache cache;
  const Vector out = forward(net, Vector{{-3.0, 4.0}}, cache);
  EXPECT_EQ(out, (Vector{{0.0, 4.0}}));
}

TEST(MlpForward, MatchesHandComputedChain) {
  const std::size_t sizes[] = {3, 4, 2};
  const Activation acts[] = {Activation::Tanh, Activation::Sigmoid};
  const Mlp net = init_network(sizes, acts, 42, {.small_final_layer = false});
  const double x[3] = {0.3, -1.2, 0.7};

  // Direct loops, no Eigen products.
  double h[4];
  for (int i = 0; i < 4; ++i) {
    double z = net.layers[0].biases[i];
    for (int j = 0; j < 3; ++j) z += net.layers[0].weights(i, j) * x[j];
    h[i] = std::tanh(z);
  }
  double y[2];
  for (int i = 0; i < 2; ++i) {
    double z = net.layers[1].biases[i];
    for (int j = 0; j < 4; ++j) z += net.layers[1].weights(i, j) * h[j];
    y[i] = 1.0 / (1.0 + std::exp(-z));
  }

  ForwardCache cache;
  const Vector out = forward(net, Vector{{x[0], x[1], x[2]}}, cache);
  ASSERT_EQ(out.size(), 2);
  EXPECT_NEAR(out[0], y[0], 1e-12);
  EXPECT_NEAR(out[1], y[1], 1e-12);
}

TEST(MlpForward, DimensionMismatchIsConfigurationError) {
  const std::size_t sizes[] = {3, 2};
  const Activation acts[] = {Activation::Linear};
  const Mlp net = init_network(sizes, acts, 1);
  ForwardCache cache;
  EXPECT_THROW(forward(net, Vector(Vector::Zero(4)), cache), ConfigurationError);
}

TEST(MlpForward, BitIdenticalOnRepeat) {
  Rng rng(7);
  const Mlp net = testing::random_network(rng);
  const Batch x = testing::random_batch(rng, net.input_size(), 5);
  const Batch a = predict(net, x);
  const Batch b = predict(net, x);
  EXPECT_EQ(0, std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())));
}

TEST(Activations, StayInRange) {
  Rng rng(3);
  // Beyond |z| ~ 19 tanh rounds to +-1 in double precision.
  const Batch z = testing::random_batch(rng, 50, 4, 15.0);
  const Batch s = activate(Activation::Sigmoid, z);
  const Batch t = activate(Activation::Tanh, z);
  const Batch r = activate(Activation::ReLU, z);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    EXPECT_GT(s.data()[i], 0.0);
    EXPECT_LT(s.data()[i], 1.0);
    EXPECT_GT(t.data()[i], -1.0);
    EXPECT_LT(t.data()[i], 1.0);
    EXPECT_GE(r.data()[i], 0.0);
  }
}

TEST(Activations, ReluDerivativeAtZeroIsZero) {
  const Batch z = Batch::Zero(1, 1);
  EXPECT_EQ(activation_derivative(Activation::ReLU, z, z)(0, 0), 0.0);
}

TEST(MlpBackward, LinearLayerCalculus) {
  Matrix w(2, 3);
  w << 1, 2, 3, 4, 5, 6;
  Mlp net{{make_layer(w, Vector{{0.5, -0.5}}, Activation::Linear)}};
  const Vector x{{1.0, -2.0, 0.5}};
  const Vector g{{0.25, -1.5}};
  ForwardCache cache;
  forward(net, x, cache);
  const auto back = backward(net, cache, g);
  const Matrix expected_w = g * x.transpose();
  EXPECT_TRUE(back.parameters[0].weights.isApprox(expected_w, 1e-15));
  EXPECT_TRUE(back.parameters[0].biases.isApprox(g, 1e-15));
  const Vector expected_in = w.transpose() * g;
  EXPECT_TRUE(back.input_gradient.col(0).isApprox(expected_in, 1e-15));
}

TEST(MlpBackward, ZeroUpstreamGivesZeroGradients) {
  Rng rng(11);
  const Mlp net = testing::random_network(rng);
  const Batch x = testing::random_batch(rng, net.input_size(), 3);
  ForwardCache cache;
  forward(net, x, cache);
  const auto back = backward(net, cache, Batch(Batch::Zero(static_cast<Eigen::Index>(net.output_size()), 3)));
  for (const auto& g : back.parameters) {
    EXPECT_TRUE(g.weights.isZero(0.0));
    EXPECT_TRUE(g.biases.isZero(0.0));
  }
  EXPECT_TRUE(back.input_gradient.isZero(0.0));
}

TEST(MlpBackward, SeededThreeLayerNetMatchesFiniteDifferences) {
  const std::size_t sizes[] = {5, 7, 6, 3};
  const Activation acts[] = {Activation::Tanh, Activation::ReLU, Activation::Sigmoid};
  Rng rng(2024);
  const Mlp net = init_network(sizes, acts, rng, {.small_final_layer = false});
  const Batch x = testing::random_batch(rng, 5, 4);
  const Batch up = testing::random_batch(rng, 3, 4);
  ForwardCache cache;
  forward(net, x, cache);
  const auto back = backward(net, cache, up);
  const auto report = testing::check_network_gradients(net, x, up, back);
  EXPECT_LT(report.max_relative_error, 1e-4);
  EXPECT_EQ(report.components, net.parameter_count() + 20);
}

TEST(MlpBackward, RandomNetworksMatchFiniteDifferences) {
  Rng rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const Mlp net = testing::random_network(rng);
    const std::size_t batch = 1 + uniform_index(rng, 3);
    const Batch x = testing::random_batch(rng, net.input_size(), batch);
    const Batch up = testing::random_batch(rng, net.output_size(), batch);
    ForwardCache cache;
    forward(net, x, cache);
    const auto back = backward(net, cache, up);
    const auto report = testing::check_network_gradients(net, x, up, back);
    EXPECT_LT(report.max_relative_error, 1e-4) << "trial " << trial;
  }
}

TEST(MlpBackward, RejectsForeignOrMismatchedCache) {
  const std::size_t sizes[] = {2, 3, 1};
  const Activation acts[] = {Activation::ReLU, Activation::Linear};
  const Mlp a = init_network(sizes, acts, 1);
  const Mlp b = init_network(sizes, acts, 2);
  ForwardCache cache;
  forward(a, Batch(Batch::Ones(2, 2)), cache);
  EXPECT_THROW(backward(b, cache, Batch(Batch::Ones(1, 2))), UsageError);
  EXPECT_THROW(backward(a, cache, Batch(Batch::Ones(1, 3))), UsageError);
  EXPECT_THROW(backward(a, cache, Batch(Batch::Ones(2, 2))), UsageError);
  EXPECT_THROW(backward(a, ForwardCache{}, Batch(Batch::Ones(1, 2))), UsageError);
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  const std::size_t sizes[] = {3, 4, 2};
  const Activation acts[] = {Activation::ReLU, Activation::Linear};
  Mlp net = init_network(sizes, acts, 5);
  const Mlp before = net;
  AdamState state = AdamState::for_network(net, {});
  adam_step(net, zero_gradients(net), state);
  EXPECT_EQ(net, before);
  EXPECT_EQ(state.step_count, 1u);
}

TEST(Adam, FirstScalarStepMovesByLearningRate) {
  std::vector<double> p{1.0}, g{1.0}, m{0.0}, v{0.0};
  adam_update(p, g, m, v, 1, {.learning_rate = 0.1});
  // m_hat = 1, v_hat = 1: p = 1 - 0.1 * 1 / (1 + 1e-8)
  EXPECT_NEAR(p[0], 0.9, 1e-8);
  EXPECT_DOUBLE_EQ(p[0], 1.0 - 0.1 / (1.0 + 1e-8));
}

TEST(Adam, TwoStepTraceMatchesRecurrence) {
  const double lr = 0.05, b1 = 0.9, b2 = 0.999, eps = 1e-8, g = 0.3;
  double ep = 2.0, em = 0.0, ev = 0.0;
  for (int t = 1; t <= 2; ++t) {
    em = b1 * em + (1 - b1) * g;
    ev = b2 * ev + (1 - b2) * g * g;
    ep -= lr * (em / (1 - std::pow(b1, t))) / (std::sqrt(ev / (1 - std::pow(b2, t))) + eps);
  }

  Mlp net{{make_layer(Matrix::Constant(1, 1, 2.0), Vector::Zero(1), Activation::Linear)}};
  AdamState state = AdamState::for_network(net, {.learning_rate = lr, .beta1 = b1, .beta2 = b2, .epsilon = eps});
  Gradients grads = zero_gradients(net);
  grads[0].weights(0, 0) = g;
  adam_step(net, grads, state);
  adam_step(net, grads, state);
  EXPECT_NEAR(net.layers[0].weights(0, 0), ep, 1e-12);
  EXPECT_NEAR(state.first_moment[0].weights(0, 0), em, 1e-12);
  EXPECT_NEAR(state.second_moment[0].weights(0, 0), ev, 1e-12);
  EXPECT_EQ(state.step_count, 2u);
}

TEST(Adam, PermutationInvariant) {
  Rng rng(8);
  const std::size_t n = 40;
  std::vector<double> p(n), g(n), m(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = uniform_real(rng, -1, 1);
    g[i] = uniform_real(rng, -1, 1);
    m[i] = uniform_real(rng, -0.1, 0.1);
    v[i] = uniform_real(rng, 0, 0.1);
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  auto permute = [&](const std::vector<double>& x) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[perm[i]];
    return y;
  };
  auto pp = permute(p), pg = permute(g), pm = permute(m), pv = permute(v);
  adam_update(p, g, m, v, 3, {});
  adam_update(pp, pg, pm, pv, 3, {});
  EXPECT_EQ(pp, permute(p));
  EXPECT_EQ(pm, permute(m));
  EXPECT_EQ(pv, permute(v));
}

TEST(Adam, NonFiniteGradientNamesLayerAndLeavesNetUntouched) {
  const std::size_t sizes[] = {2, 3, 1};
  const Activation acts[] = {Activation::ReLU, Activation::Linear};
  Mlp net = init_network(sizes, acts, 5);
  const Mlp before = net;
  AdamState state = AdamState::for_network(net, {});
  Gradients grads = zero_gradients(net);
  grads[1].biases[0] = std::numeric_limits<double>::quiet_NaN();
  try {
    adam_step(net, grads, state);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_EQ(e.layer(), 1u);
  }
  EXPECT_EQ(net, before);
  EXPECT_EQ(state.step_count, 0u);
}

TEST(InitNetwork, SameSeedIsBitIdentical) {
  const std::size_t sizes[] = {29, 30, 3};
  const Activation acts[] = {Activation::ReLU, Activation::Linear};
  EXPECT_EQ(init_network(sizes, acts, 17), init_network(sizes, acts, 17));
  EXPECT_FALSE(init_network(sizes, acts, 17) == init_network(sizes, acts, 18));
}

TEST(InitNetwork, WeightsWithinBounds) {
  const std::size_t sizes[] = {100, 50, 4};
  const Activation acts[] = {Activation::ReLU, Activation::Linear};
  const Mlp net = init_network(sizes, acts, 3);
  EXPECT_LE(net.layers[0].weights.cwiseAbs().maxCoeff(), 0.1);
  EXPECT_GT(net.layers[0].weights.cwiseAbs().maxCoeff(), 0.09);
  EXPECT_LE(net.layers[1].weights.cwiseAbs().maxCoeff(), 3e-3);
  EXPECT_LE(net.layers[1].biases.cwiseAbs().maxCoeff(), 3e-3);
}

TEST(InitNetwork, RejectsEmptyArchitecture) {
  const std::size_t only_input[] = {4};
  EXPECT_THROW(init_network(only_input, std::span<const Activation>{}, 1), ConfigurationError);
  const std::size_t sizes[] = {4, 0, 2};
  const Activation acts[] = {Activation::ReLU, Activation::Linear};
  EXPECT_THROW(init_network(sizes, acts, 1), ConfigurationError);
}

TEST(Mlp, ValidateCatchesBrokenChain) {
  Mlp net{{make_layer(Matrix::Zero(3, 2), Vector::Zero(3), Activation::ReLU),
           make_layer(Matrix::Zero(1, 4), Vector::Zero(1), Activation::Linear)}};
  EXPECT_THROW(net.validate(), ConfigurationError);
  net.layers[1].weights = Matrix::Zero(1, 3);
  EXPECT_NO_THROW(net.validate());
  net.layers[0].biases = Vector::Zero(2);
  EXPECT_THROW(net.validate(), ConfigurationError);
}

}  // namespace
}  // namespace drivepg::nn
