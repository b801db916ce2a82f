#include "ccmaae/neuralnet.hpp"

#include <cmath>
#include <stdexcept>

namespace ccmaae {

namespace {

constexpr double kBceEps = 1e-7;

Matrix apply_activation(const Matrix& z, Activation a, double alpha) {
  switch (a) {
    case Activation::kLinear:
      return z;
    case Activation::kRelu:
      return z.cwiseMax(0.0);
    case Activation::kLeakyRelu:
      return z.cwiseMax(0.0) + alpha * z.cwiseMin(0.0);
    case Activation::kSigmoid:
      return ((-z.array()).exp() + 1.0).inverse().matrix();
  }
  throw std::logic_error("apply_activation: unknown activation");
}

// Derivative expressed through the activated value: sign is preserved by
// relu/leaky-relu and sigmoid' = a (1 - a).
Matrix activation_derivative(const Matrix& act, Activation a, double alpha) {
  switch (a) {
    case Activation::kLinear:
      return Matrix::Ones(act.rows(), act.cols());
    case Activation::kRelu:
      return (act.array() > 0.0).cast<double>().matrix();
    case Activation::kLeakyRelu:
      return ((act.array() > 0.0).cast<double>() * (1.0 - alpha) + alpha).matrix();
    case Activation::kSigmoid:
      return (act.array() * (1.0 - act.array())).matrix();
  }
  throw std::logic_error("activation_derivative: unknown activation");
}

}  // namespace

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::kLinear: return "linear";
    case Activation::kRelu: return "relu";
    case Activation::kLeakyRelu: return "leaky_relu";
    case Activation::kSigmoid: return "sigmoid";
  }
  throw std::logic_error("activation_name: unknown activation");
}

Activation activation_from_name(const std::string& name) {
  if (name == "linear") return Activation::kLinear;
  if (name == "relu") return Activation::kRelu;
  if (name == "leaky_relu") return Activation::kLeakyRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  throw std::invalid_argument("activation_from_name: unknown activation '" + name + "'");
}

void validate_stack(const MlpStack& stack) {
  if (stack.layers.empty())
    throw std::invalid_argument("MlpStack: at least one layer required");
  if (stack.l2 < 0.0)
    throw std::invalid_argument("MlpStack: l2 coefficient must be nonnegative");
  for (size_t l = 0; l < stack.layers.size(); ++l) {
    const DenseLayer& layer = stack.layers[l];
    if (layer.bias.size() != layer.out_dim())
      throw std::invalid_argument("MlpStack: bias size mismatch in layer " + std::to_string(l));
    if (l > 0 && layer.in_dim() != stack.layers[l - 1].out_dim())
      throw std::invalid_argument("MlpStack: layer " + std::to_string(l) +
                                  " input dim does not chain with previous output dim");
    if (!layer.weights.allFinite() || !layer.bias.allFinite())
      throw std::invalid_argument("MlpStack: non-finite parameters in layer " + std::to_string(l));
  }
}

MlpStack make_mlp(const std::vector<Index>& dims, const std::vector<Activation>& acts,
                  Rng& rng, double l2, double leaky_alpha) {
  if (dims.size() < 2 || acts.size() != dims.size() - 1)
    throw std::invalid_argument("make_mlp: need n+1 dims for n activations, n >= 1");
  MlpStack stack;
  stack.l2 = l2;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer layer;
    const Index fan_in = dims[l];
    const Index fan_out = dims[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    layer.weights = Matrix(fan_out, fan_in);
    for (Index i = 0; i < fan_out; ++i)
      for (Index j = 0; j < fan_in; ++j)
        layer.weights(i, j) = rng.uniform_range(-limit, limit);
    layer.bias = Vector::Zero(fan_out);
    layer.activation = acts[l];
    layer.leaky_alpha = leaky_alpha;
    stack.layers.push_back(std::move(layer));
  }
  validate_stack(stack);
  return stack;
}

Matrix forward(const MlpStack& stack, const Matrix& input) {
  if (input.cols() != stack.input_dim())
    throw std::invalid_argument("forward: input width " + std::to_string(input.cols()) +
                                " != stack input dim " + std::to_string(stack.input_dim()));
  Matrix x = input;
  for (const DenseLayer& layer : stack.layers) {
    Matrix z = x * layer.weights.transpose();
    z.rowwise() += layer.bias.transpose();
    x = apply_activation(z, layer.activation, layer.leaky_alpha);
  }
  return x;
}

ForwardCache forward_cached(const MlpStack& stack, const Matrix& input) {
  if (input.cols() != stack.input_dim())
    throw std::invalid_argument("forward_cached: input width " + std::to_string(input.cols()) +
                                " != stack input dim " + std::to_string(stack.input_dim()));
  ForwardCache cache;
  cache.input = input;
  cache.acts.reserve(stack.layers.size());
  const Matrix* x = &cache.input;
  for (const DenseLayer& layer : stack.layers) {
    Matrix z = (*x) * layer.weights.transpose();
    z.rowwise() += layer.bias.transpose();
    cache.acts.push_back(apply_activation(z, layer.activation, layer.leaky_alpha));
    x = &cache.acts.back();
  }
  return cache;
}

StackGradients backward(const MlpStack& stack, const ForwardCache& cache,
                        const Matrix& upstream) {
  const size_t n_layers = stack.layers.size();
  if (cache.acts.size() != n_layers)
    throw std::invalid_argument("backward: cache does not match stack (missing forward pass?)");
  if (upstream.rows() != cache.input.rows() || upstream.cols() != stack.output_dim())
    throw std::invalid_argument("backward: upstream shape mismatch");

  StackGradients grads;
  grads.weight_grads.resize(n_layers);
  grads.bias_grads.resize(n_layers);

  Matrix delta = upstream.cwiseProduct(activation_derivative(
      cache.acts.back(), stack.layers.back().activation, stack.layers.back().leaky_alpha));
  for (size_t l = n_layers; l-- > 0;) {
    const DenseLayer& layer = stack.layers[l];
    const Matrix& layer_input = l == 0 ? cache.input : cache.acts[l - 1];
    grads.weight_grads[l] = delta.transpose() * layer_input + 2.0 * stack.l2 * layer.weights;
    grads.bias_grads[l] = delta.colwise().sum().transpose();
    Matrix dinput = delta * layer.weights;
    if (l == 0) {
      grads.input_grad = std::move(dinput);
    } else {
      delta = dinput.cwiseProduct(activation_derivative(
          cache.acts[l - 1], stack.layers[l - 1].activation, stack.layers[l - 1].leaky_alpha));
    }
  }
  return grads;
}

double l2_penalty(const MlpStack& stack) {
  double ssq = 0.0;
  for (const DenseLayer& layer : stack.layers) ssq += layer.weights.squaredNorm();
  return stack.l2 * ssq;
}

LossValue bce(const Matrix& pred, const Matrix& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw std::invalid_argument("bce: prediction/target shape mismatch");
  const double n = static_cast<double>(pred.size());
  Eigen::ArrayXXd p = pred.array().min(1.0 - kBceEps).max(kBceEps);
  Eigen::ArrayXXd t = target.array();
  LossValue out;
  out.value = -(t * p.log() + (1.0 - t) * (1.0 - p).log()).sum() / n;
  out.grad = ((-t / p + (1.0 - t) / (1.0 - p)) / n).matrix();
  return out;
}

AdamState::AdamState(const MlpStack& stack, AdamConfig cfg) : config(cfg) {
  moments.reserve(stack.layers.size());
  for (const DenseLayer& layer : stack.layers) {
    Moments m;
    m.m_w = Matrix::Zero(layer.out_dim(), layer.in_dim());
    m.v_w = Matrix::Zero(layer.out_dim(), layer.in_dim());
    m.m_b = Vector::Zero(layer.out_dim());
    m.v_b = Vector::Zero(layer.out_dim());
    moments.push_back(std::move(m));
  }
}

namespace {

template <typename Param, typename Grad>
void adam_update(Param& param, const Grad& grad, Param& m, Param& v, double bc1, double bc2,
                 const AdamConfig& c) {
  m = c.beta1 * m + (1.0 - c.beta1) * grad;
  v = (c.beta2 * v.array() + (1.0 - c.beta2) * grad.array().square()).matrix();
  param.array() -= c.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + c.epsilon);
}

}  // namespace

void AdamState::step(MlpStack& stack, const StackGradients& grads) {
  if (moments.size() != stack.layers.size() || grads.weight_grads.size() != stack.layers.size())
    throw std::invalid_argument("AdamState::step: state/gradient shape mismatch");
  ++step_count;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(step_count));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(step_count));
  for (size_t l = 0; l < stack.layers.size(); ++l) {
    adam_update(stack.layers[l].weights, grads.weight_grads[l], moments[l].m_w, moments[l].v_w,
                bc1, bc2, config);
    adam_update(stack.layers[l].bias, grads.bias_grads[l], moments[l].m_b, moments[l].v_b,
                bc1, bc2, config);
  }
}

}  // namespace ccmaae
