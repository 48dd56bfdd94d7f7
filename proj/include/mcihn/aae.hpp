// include/mcihn/aae.hpp

// Copyright 2026 The mcihn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Per-modality adversarial autoencoder.
//
// Encoder:  S = R_e * act(X W_e + b_e)        X: T_m x D_m  ->  S: T x d
// Decoder:  X^ = act(R_d S) W_d + b_d         S: T x d      ->  X^: T_m x D_m
// Discriminator: each latent row z (a d-vector) is scored by
//           D(z) = sigmoid(relu(z W1 + b1) W2 + b2), hidden width 4d.

#ifndef MCIHN_AAE_HPP_
#define MCIHN_AAE_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcihn/dataio.hpp"
#include "mcihn/optim.hpp"
#include "mcihn/tensor.hpp"

namespace mcihn {

enum class Activation { kRelu, kIdentity };

struct AaeShape {
  SeqShape input;                 // T_m, D_m
  std::size_t latent_steps = 8;   // T
  std::size_t latent_dim = 16;    // d
  std::size_t disc_hidden = 64;   // 4d by default
  Activation activation = Activation::kRelu;
};

struct AaeParams {
  AaeShape shape;
  // encoder
  Tensor enc_w, enc_b, enc_time;
  // decoder
  Tensor dec_time, dec_w, dec_b;
  // discriminator
  Tensor disc_w1, disc_b1, disc_w2, disc_b2;

  static AaeParams Init(const AaeShape &shape, std::mt19937_64 &rng);

  std::vector<Tensor> EncoderParams() const;
  std::vector<Tensor> DecoderParams() const;
  std::vector<Tensor> DiscriminatorParams() const;
  std::vector<std::pair<std::string, Tensor>> Named(const std::string &prefix) const;
};

/// Converts stored features to a double-precision tensor.
Tensor ToTensor(const FeatureMatrix &x);

Tensor Encode(const AaeParams &params, const Tensor &x);
Tensor Decode(const AaeParams &params, const Tensor &s);

/// Mean squared error over all entries.
Tensor ReconstructionLoss(const Tensor &x, const Tensor &x_hat);

/// i.i.d. N(0, 1) entries, deterministic in seed.
Tensor SamplePrior(std::size_t steps, std::size_t dim, std::uint64_t seed);

/// Row-wise discriminator probabilities, n x 1. With `frozen` the weights
/// enter as constants so no gradient reaches them.
Tensor Discriminate(const AaeParams &params, const Tensor &rows,
                    bool frozen = false);

inline constexpr double kLogFloor = 1e-7;

/// -[mean log D(prior) + mean log(1 - D(latent))].
Tensor DiscriminatorLoss(const AaeParams &params, const Tensor &prior_rows,
                         const Tensor &latent_rows);

/// -mean log D(latent), scored by a frozen discriminator.
Tensor EncoderAdversarialLoss(const AaeParams &params,
                              const Tensor &latent_rows);

struct AaeLosses {
  double reconstruction = 0.0;
  double discriminator = 0.0;
  double generator = 0.0;
};

/// One optimizer per phase. Each is bound to the tensors that phase may
/// change: encoder + decoder, discriminator, encoder.
struct AaeOptimizers {
  Adam reconstruction;
  Adam discriminator;
  Adam generator;

  static AaeOptimizers For(const AaeParams &params, const AdamConfig &config);
};

/// Phase 1: one update of encoder and decoder on the mean reconstruction
/// loss. Returns the loss before the update.
double AaeReconstructionPhase(AaeParams &params, std::span<const Tensor> x_batch,
                              Adam &optimizer);
/// Phase 2: one discriminator update against prior rows drawn from `seed`;
/// latents come from the current encoder without gradient.
double AaeDiscriminatorPhase(AaeParams &params, std::span<const Tensor> x_batch,
                             Adam &optimizer, std::uint64_t seed);
/// Phase 3: one encoder update on the non-saturating adversarial loss.
double AaeGeneratorPhase(AaeParams &params, std::span<const Tensor> x_batch,
                         Adam &optimizer);

/// Runs the reconstruction phase, then the discriminator phase with the
/// encoder frozen, then the encoder's adversarial phase with the
/// discriminator frozen. `seed` drives the prior draw.
AaeLosses AaeStep(AaeParams &params, std::span<const Tensor> x_batch,
                  AaeOptimizers &optimizers, std::uint64_t seed);

}  // namespace mcihn

#endif  // MCIHN_AAE_HPP_
