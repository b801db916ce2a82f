#pragma once

#include <cstdint>
#include <vector>

#include "ccmaae/neuralnet.hpp"
#include "ccmaae/types.hpp"

// The CCM adversarial autoencoder: an encoder mapping data into the ambient
// space R^{d+1} of a constant-curvature manifold, a decoder mapping back, and
// a critic scoring ambient points. Training alternates three phases per
// batch: reconstruction (encoder + decoder), critic, and encoder
// regularisation. The regularisation phases score points with the combined
// critic
//
//   C~(z) = (C(z) + mu(z)) / 2
//
// i.e. the arithmetic mean of the critic probability and the manifold
// membership degree, so the encoder is pulled both toward fooling the critic
// and toward the manifold itself. Embeddings are never projected during
// regularisation; projection is a decode-time policy and a test-time step.

namespace ccmaae {

struct CcmAae {
  MlpStack encoder;  // input -> R^{d+1}
  MlpStack decoder;  // R^{d+1} -> input space, sigmoid output
  MlpStack critic;   // R^{d+1} -> (0, 1)
  Curvature curvature = Curvature::spherical();
  MembershipWidth width{5.0};
  bool project_before_decode = false;

  Index input_dim() const { return encoder.input_dim(); }
  Index ambient_dim() const { return encoder.output_dim(); }
  Index latent_dim() const { return ambient_dim() - 1; }
};

/// Encoder, decoder and critic must agree on the ambient width d+1.
void validate_model(const CcmAae& model);

/// The experiment architecture: encoder 256-128 relu + linear ambient head,
/// decoder mirrored with sigmoid output, critic with two leaky-relu hidden
/// layers of `critic_hidden` units, L2-regularised, sigmoid output.
CcmAae make_ccm_aae(Index input_dim, Index latent_dim, Curvature curvature, double sigma_m,
                    Index critic_hidden, double leaky_alpha, double critic_l2, Rng& init_rng);

/// Raw ambient embeddings; no projection.
Matrix encode(const CcmAae& model, const Matrix& x);

/// Decode latent codes; when project_before_decode is set the codes are
/// first projected onto the manifold (unprojectable codes propagate the
/// geometry error).
Matrix decode(const CcmAae& model, const Matrix& z);

/// C~(z) per row: exact arithmetic mean of critic output and membership.
Vector combined_critic(const CcmAae& model, const Matrix& z);

struct AaeOptimizers {
  AdamState encoder, decoder, critic;
  AaeOptimizers() = default;
  AaeOptimizers(const CcmAae& model, AdamConfig cfg)
      : encoder(model.encoder, cfg), decoder(model.decoder, cfg), critic(model.critic, cfg) {}
};

/// One Adam update of encoder + decoder on BCE(x, decode(encode(x))).
/// Returns the pre-update loss. The critic is untouched.
double reconstruction_step(CcmAae& model, const Matrix& x, AaeOptimizers& opt);

/// One Adam update of the critic, scoring prior samples against embeddings
/// through C~. The membership term carries no critic parameters, so this
/// trains C on the averaged probabilities. Encoder and decoder untouched.
double critic_step(CcmAae& model, const Matrix& x, const Matrix& prior_batch,
                   AaeOptimizers& opt);

/// One Adam update of the encoder on the non-saturating adversarial loss
/// -E[log C~(E(x))]; gradients flow through both the critic path and the
/// membership path. Critic and decoder untouched.
double encoder_regularisation_step(CcmAae& model, const Matrix& x, AaeOptimizers& opt);

struct TrainSeeds {
  std::uint64_t init = 1;
  std::uint64_t shuffle = 2;
  std::uint64_t binarise = 3;
  std::uint64_t prior = 4;
  std::uint64_t labels = 5;
};

struct TrainConfig {
  Index batch_size = 1024;
  double learning_rate = 0.001;
  Index critic_hidden = 64;
  double leaky_alpha = 0.3;
  double l2 = 0.01;
  double sigma_m = 5.0;
  Index latent_dim = 2;
  int kappa = 1;
  Index max_epochs = 1000;
  Index patience = 50;
  TrainSeeds seeds;
};

struct EpochStats {
  double reconstruction_loss;
  double critic_loss;
  double adversarial_loss;
  double mean_membership;  // of raw validation embeddings
  double validation_loss;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  Index best_epoch = -1;
};

/// Full training loop: per batch runs reconstruction, critic and encoder
/// regularisation (in that order, on the same dynamically binarised batch,
/// with a fresh prior draw per critic step). Tracks validation
/// reconstruction loss on a once-binarised validation set, stops when it has
/// not improved for `patience` epochs, and restores the best parameters.
TrainHistory train(CcmAae& model, const Matrix& train_pixels, const Matrix& val_pixels,
                   const TrainConfig& config);

}  // namespace ccmaae
