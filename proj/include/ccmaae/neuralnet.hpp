#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccmaae/rng.hpp"
#include "ccmaae/types.hpp"

// Dense feed-forward stacks with exact reverse-mode gradients, binary
// cross-entropy, and Adam. Everything is 64-bit and deterministic: a stack
// plus its optimiser state is one single-threaded training unit, while
// forward passes never mutate the stack, so inference on a snapshot is safe
// to share.

namespace ccmaae {

enum class Activation { kLinear, kRelu, kLeakyRelu, kSigmoid };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;     // out
  Activation activation = Activation::kLinear;
  double leaky_alpha = 0.3;

  Index in_dim() const { return weights.cols(); }
  Index out_dim() const { return weights.rows(); }
};

struct MlpStack {
  std::vector<DenseLayer> layers;
  double l2 = 0.0;  // coefficient of the sum of squared weights (biases exempt)

  Index input_dim() const { return layers.front().in_dim(); }
  Index output_dim() const { return layers.back().out_dim(); }
};

/// Consecutive layer dimensions must chain; throws otherwise.
void validate_stack(const MlpStack& stack);

/// Glorot-uniform initialisation: W ~ U(+-sqrt(6/(fan_in+fan_out))), b = 0.
/// dims has one entry per interface, acts one per layer (dims.size() - 1).
MlpStack make_mlp(const std::vector<Index>& dims, const std::vector<Activation>& acts,
                  Rng& rng, double l2 = 0.0, double leaky_alpha = 0.3);

struct ForwardCache {
  Matrix input;              // the batch fed to the stack
  std::vector<Matrix> acts;  // activated output of each layer
  const Matrix& output() const { return acts.back(); }
};

Matrix forward(const MlpStack& stack, const Matrix& input);
ForwardCache forward_cached(const MlpStack& stack, const Matrix& input);

struct StackGradients {
  std::vector<Matrix> weight_grads;
  std::vector<Vector> bias_grads;
  Matrix input_grad;  // gradient of the loss w.r.t. the input batch
};

/// Exact gradients for the scalar loss whose per-output sensitivities are
/// `upstream` (same shape as the stack output). Weight gradients include the
/// L2 contribution 2 * l2 * W.
StackGradients backward(const MlpStack& stack, const ForwardCache& cache,
                        const Matrix& upstream);

/// l2 * sum of squared weights; the loss-side counterpart of the gradient
/// term added by backward().
double l2_penalty(const MlpStack& stack);

struct LossValue {
  double value;
  Matrix grad;  // w.r.t. the predictions
};

/// Mean binary cross-entropy over all elements. Predictions are clamped to
/// [1e-7, 1 - 1e-7] before the logs.
LossValue bce(const Matrix& pred, const Matrix& target);

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam over every parameter of one stack.
struct AdamState {
  struct Moments {
    Matrix m_w, v_w;
    Vector m_b, v_b;
  };

  AdamConfig config;
  std::vector<Moments> moments;
  std::int64_t step_count = 0;

  AdamState() = default;
  AdamState(const MlpStack& stack, AdamConfig cfg);

  void step(MlpStack& stack, const StackGradients& grads);
};

}  // namespace ccmaae
