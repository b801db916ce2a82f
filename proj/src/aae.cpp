#include "ccmaae/aae.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ccmaae/data.hpp"
#include "ccmaae/geometry.hpp"
#include "ccmaae/priors.hpp"

namespace ccmaae {

namespace {

constexpr double kProbEps = 1e-7;

Eigen::ArrayXd clamp_prob(const Eigen::ArrayXd& p) {
  return p.min(1.0 - kProbEps).max(kProbEps);
}

}  // namespace

void validate_model(const CcmAae& model) {
  validate_stack(model.encoder);
  validate_stack(model.decoder);
  validate_stack(model.critic);
  const Index ambient = model.encoder.output_dim();
  if (ambient < 2)
    throw std::invalid_argument("CcmAae: ambient dimension must be >= 2 (latent d >= 1)");
  if (model.decoder.input_dim() != ambient || model.critic.input_dim() != ambient)
    throw std::invalid_argument("CcmAae: encoder output, decoder input and critic input widths must all equal d+1");
  if (model.decoder.output_dim() != model.encoder.input_dim())
    throw std::invalid_argument("CcmAae: decoder output width must match encoder input width");
  if (model.critic.output_dim() != 1)
    throw std::invalid_argument("CcmAae: critic must have a single output unit");
}

CcmAae make_ccm_aae(Index input_dim, Index latent_dim, Curvature curvature, double sigma_m,
                    Index critic_hidden, double leaky_alpha, double critic_l2, Rng& init_rng) {
  if (input_dim < 1 || latent_dim < 1 || critic_hidden < 1)
    throw std::invalid_argument("make_ccm_aae: dimensions must be positive");
  const Index ambient = latent_dim + 1;
  CcmAae model{
      make_mlp({input_dim, 256, 128, ambient},
               {Activation::kRelu, Activation::kRelu, Activation::kLinear}, init_rng),
      make_mlp({ambient, 128, 256, input_dim},
               {Activation::kRelu, Activation::kRelu, Activation::kSigmoid}, init_rng),
      make_mlp({ambient, critic_hidden, critic_hidden, 1},
               {Activation::kLeakyRelu, Activation::kLeakyRelu, Activation::kSigmoid}, init_rng,
               critic_l2, leaky_alpha),
      curvature, MembershipWidth(sigma_m)};
  validate_model(model);
  return model;
}

Matrix encode(const CcmAae& model, const Matrix& x) { return forward(model.encoder, x); }

Matrix decode(const CcmAae& model, const Matrix& z) {
  if (z.cols() != model.ambient_dim())
    throw std::invalid_argument("decode: latent width " + std::to_string(z.cols()) +
                                " != d+1 = " + std::to_string(model.ambient_dim()));
  if (model.project_before_decode)
    return forward(model.decoder, project_rows(z, model.curvature));
  return forward(model.decoder, z);
}

Vector combined_critic(const CcmAae& model, const Matrix& z) {
  const Vector c = forward(model.critic, z).col(0);
  const Vector mu = membership_rows(z, model.curvature, model.width);
  return 0.5 * (c + mu);
}

double reconstruction_step(CcmAae& model, const Matrix& x, AaeOptimizers& opt) {
  ForwardCache enc_cache = forward_cached(model.encoder, x);
  const Matrix& z_raw = enc_cache.output();

  Matrix z = model.project_before_decode ? project_rows(z_raw, model.curvature) : z_raw;
  ForwardCache dec_cache = forward_cached(model.decoder, z);
  LossValue loss = bce(dec_cache.output(), x);

  StackGradients dec_grads = backward(model.decoder, dec_cache, loss.grad);
  Matrix dz = model.project_before_decode
                  ? project_rows_pullback(z_raw, dec_grads.input_grad, model.curvature)
                  : dec_grads.input_grad;
  StackGradients enc_grads = backward(model.encoder, enc_cache, dz);

  opt.decoder.step(model.decoder, dec_grads);
  opt.encoder.step(model.encoder, enc_grads);
  return loss.value;
}

double critic_step(CcmAae& model, const Matrix& x, const Matrix& prior_batch,
                   AaeOptimizers& opt) {
  if (prior_batch.cols() != model.ambient_dim())
    throw std::invalid_argument("critic_step: prior batch width != d+1");
  if (prior_batch.rows() != x.rows())
    throw std::invalid_argument("critic_step: prior batch size != data batch size");
  const Index n = x.rows();

  const Matrix z_data = encode(model, x);  // constant w.r.t. the critic update
  Matrix z(2 * n, model.ambient_dim());
  z.topRows(n) = prior_batch;
  z.bottomRows(n) = z_data;

  ForwardCache cache = forward_cached(model.critic, z);
  const Eigen::ArrayXd c = cache.output().col(0).array();
  const Eigen::ArrayXd mu = membership_rows(z, model.curvature, model.width).array();
  const Eigen::ArrayXd ct = clamp_prob(0.5 * (c + mu));

  // Maximise E[log C~(prior)] + E[log(1 - C~(E(x)))]  ==  minimise the
  // negation; dC~/dC = 1/2 since mu carries no critic parameters.
  const double nd = static_cast<double>(n);
  const double loss = -(ct.head(n).log().mean() + (1.0 - ct.tail(n)).log().mean());
  Matrix upstream(2 * n, 1);
  upstream.col(0).head(n) = ((-0.5 / nd) / ct.head(n)).matrix();
  upstream.col(0).tail(n) = ((0.5 / nd) / (1.0 - ct.tail(n))).matrix();

  StackGradients grads = backward(model.critic, cache, upstream);
  opt.critic.step(model.critic, grads);
  return loss;
}

double encoder_regularisation_step(CcmAae& model, const Matrix& x, AaeOptimizers& opt) {
  const Index n = x.rows();
  ForwardCache enc_cache = forward_cached(model.encoder, x);
  const Matrix& z = enc_cache.output();

  ForwardCache crit_cache = forward_cached(model.critic, z);
  const Eigen::ArrayXd c = crit_cache.output().col(0).array();
  const Eigen::ArrayXd mu = membership_rows(z, model.curvature, model.width).array();
  const Eigen::ArrayXd ct = clamp_prob(0.5 * (c + mu));

  // Non-saturating objective: minimise -E[log C~(E(x))].
  const double loss = -ct.log().mean();
  const Eigen::ArrayXd dct = -1.0 / ct / static_cast<double>(n);

  Matrix upstream_c(n, 1);
  upstream_c.col(0) = (0.5 * dct).matrix();
  StackGradients crit_grads = backward(model.critic, crit_cache, upstream_c);  // input path only

  const Matrix mu_jac = membership_jacobian_rows(z, model.curvature, model.width);
  Matrix dz = crit_grads.input_grad + (0.5 * dct).matrix().asDiagonal() * mu_jac;

  StackGradients enc_grads = backward(model.encoder, enc_cache, dz);
  opt.encoder.step(model.encoder, enc_grads);
  return loss;
}

TrainHistory train(CcmAae& model, const Matrix& train_pixels, const Matrix& val_pixels,
                   const TrainConfig& config) {
  validate_model(model);
  if (train_pixels.rows() == 0 || val_pixels.rows() == 0)
    throw std::invalid_argument("train: empty dataset");
  if (train_pixels.cols() != model.input_dim() || val_pixels.cols() != model.input_dim())
    throw std::invalid_argument("train: dataset width != model input dim");
  if (config.batch_size < 1 || config.max_epochs < 1 || config.patience < 1)
    throw std::invalid_argument("train: batch_size, max_epochs and patience must be >= 1");

  const Index n = train_pixels.rows();
  const Index batch = std::min(config.batch_size, n);
  const Index d = model.latent_dim();

  // Validation is binarised once (stream 0) so early stopping is stable;
  // per-epoch batches use streams 1.. derived from the batch index.
  const Matrix val_bin = dynamic_binarise(val_pixels, mix_seed(config.seeds.binarise, 0), 0);

  AaeOptimizers opt(model, AdamConfig{config.learning_rate});
  Rng shuffle_rng(config.seeds.shuffle);
  Rng prior_rng(config.seeds.prior);

  TrainHistory history;
  double best_val = std::numeric_limits<double>::infinity();
  CcmAae best = model;

  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));

  for (Index epoch = 0; epoch < config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);

    double rec_sum = 0.0, critic_sum = 0.0, adv_sum = 0.0;
    Index n_batches = 0;
    for (Index start = 0; start < n; start += batch) {
      const Index size = std::min(batch, n - start);
      Matrix xb(size, train_pixels.cols());
      for (Index i = 0; i < size; ++i)
        xb.row(i) = train_pixels.row(order[static_cast<size_t>(start + i)]);
      const Matrix xb_bin = dynamic_binarise(
          xb, mix_seed(config.seeds.binarise, static_cast<std::uint64_t>(n_batches) + 1),
          static_cast<std::uint64_t>(epoch));

      rec_sum += reconstruction_step(model, xb_bin, opt);
      const Matrix prior = sample_prior(model.curvature, d, size, prior_rng);
      critic_sum += critic_step(model, xb_bin, prior, opt);
      adv_sum += encoder_regularisation_step(model, xb_bin, opt);
      ++n_batches;
    }

    const Matrix val_z = encode(model, val_bin);
    const double val_loss = bce(decode(model, val_z), val_bin).value;
    const double mean_mu = membership_rows(val_z, model.curvature, model.width).mean();

    history.epochs.push_back({rec_sum / n_batches, critic_sum / n_batches, adv_sum / n_batches,
                              mean_mu, val_loss});

    if (val_loss < best_val) {
      best_val = val_loss;
      history.best_epoch = epoch;
      best = model;
    } else if (epoch - history.best_epoch >= config.patience) {
      break;
    }
  }

  if (history.best_epoch < 0)
    throw std::runtime_error("train: validation loss never became finite (diverged)");
  model = best;
  return history;
}

}  // namespace ccmaae
