// src/aae.cpp

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

#include "mcihn/aae.hpp"

#include <cmath>

namespace mcihn {

namespace {

Tensor Activate(const Tensor &x, Activation act) {
  return act == Activation::kRelu ? Relu(x) : x;
}

Tensor Constant(const Tensor &t, bool frozen) { return frozen ? t.Detach() : t; }

}  // namespace

AaeParams AaeParams::Init(const AaeShape &shape, std::mt19937_64 &rng) {
  const std::size_t tm = shape.input.steps, dm = shape.input.dim;
  const std::size_t t = shape.latent_steps, d = shape.latent_dim;
  const std::size_t h = shape.disc_hidden;
  AaeParams p;
  p.shape = shape;
  p.enc_w = GlorotUniform(dm, d, rng);
  p.enc_b = Tensor::Zeros(1, d, true);
  p.enc_time = GlorotUniform(t, tm, rng);
  p.dec_time = GlorotUniform(tm, t, rng);
  p.dec_w = GlorotUniform(d, dm, rng);
  p.dec_b = Tensor::Zeros(1, dm, true);
  p.disc_w1 = GlorotUniform(d, h, rng);
  p.disc_b1 = Tensor::Zeros(1, h, true);
  p.disc_w2 = GlorotUniform(h, 1, rng);
  p.disc_b2 = Tensor::Zeros(1, 1, true);
  return p;
}

std::vector<Tensor> AaeParams::EncoderParams() const {
  return {enc_w, enc_b, enc_time};
}
std::vector<Tensor> AaeParams::DecoderParams() const {
  return {dec_time, dec_w, dec_b};
}
std::vector<Tensor> AaeParams::DiscriminatorParams() const {
  return {disc_w1, disc_b1, disc_w2, disc_b2};
}

std::vector<std::pair<std::string, Tensor>> AaeParams::Named(
    const std::string &prefix) const {
  return {{prefix + ".enc_w", enc_w},     {prefix + ".enc_b", enc_b},
          {prefix + ".enc_time", enc_time}, {prefix + ".dec_time", dec_time},
          {prefix + ".dec_w", dec_w},     {prefix + ".dec_b", dec_b},
          {prefix + ".disc_w1", disc_w1}, {prefix + ".disc_b1", disc_b1},
          {prefix + ".disc_w2", disc_w2}, {prefix + ".disc_b2", disc_b2}};
}

Tensor ToTensor(const FeatureMatrix &x) {
  return Tensor({x.rows, x.cols},
                std::vector<double>(x.values.begin(), x.values.end()));
}

Tensor Encode(const AaeParams &params, const Tensor &x) {
  const SeqShape &in = params.shape.input;
  if (x.rank() != 2 || x.rows() != in.steps || x.cols() != in.dim)
    throw ShapeError("encode: expected [" + std::to_string(in.steps) + "x" +
                     std::to_string(in.dim) + "], got " +
                     ShapeToString(x.shape()));
  Tensor h = Activate(AddRow(MatMul(x, params.enc_w), params.enc_b),
                      params.shape.activation);
  return MatMul(params.enc_time, h);
}

Tensor Decode(const AaeParams &params, const Tensor &s) {
  if (s.rank() != 2 || s.rows() != params.shape.latent_steps ||
      s.cols() != params.shape.latent_dim)
    throw ShapeError("decode: expected [" +
                     std::to_string(params.shape.latent_steps) + "x" +
                     std::to_string(params.shape.latent_dim) + "], got " +
                     ShapeToString(s.shape()));
  Tensor u = Activate(MatMul(params.dec_time, s), params.shape.activation);
  return AddRow(MatMul(u, params.dec_w), params.dec_b);
}

Tensor ReconstructionLoss(const Tensor &x, const Tensor &x_hat) {
  Tensor diff = Sub(x, x_hat);
  return Mean(Mul(diff, diff));
}

Tensor SamplePrior(std::size_t steps, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return RandomNormal(steps, dim, rng);
}

Tensor Discriminate(const AaeParams &params, const Tensor &rows, bool frozen) {
  Tensor hidden = Relu(AddRow(MatMul(rows, Constant(params.disc_w1, frozen)),
                              Constant(params.disc_b1, frozen)));
  return Sigmoid(AddRow(MatMul(hidden, Constant(params.disc_w2, frozen)),
                        Constant(params.disc_b2, frozen)));
}

Tensor DiscriminatorLoss(const AaeParams &params, const Tensor &prior_rows,
                         const Tensor &latent_rows) {
  Tensor real = Mean(LogClamped(Discriminate(params, prior_rows), kLogFloor));
  Tensor fake = Mean(LogClamped(
      Affine(Discriminate(params, latent_rows), -1.0, 1.0), kLogFloor));
  return Affine(Add(real, fake), -1.0);
}

Tensor EncoderAdversarialLoss(const AaeParams &params,
                              const Tensor &latent_rows) {
  Tensor d = Discriminate(params, latent_rows, /*frozen=*/true);
  return Affine(Mean(LogClamped(d, kLogFloor)), -1.0);
}

AaeOptimizers AaeOptimizers::For(const AaeParams &params,
                                 const AdamConfig &config) {
  std::vector<Tensor> ae = params.EncoderParams();
  for (const Tensor &t : params.DecoderParams()) ae.push_back(t);
  return {Adam(std::move(ae), config),
          Adam(params.DiscriminatorParams(), config),
          Adam(params.EncoderParams(), config)};
}

double AaeReconstructionPhase(AaeParams &params, std::span<const Tensor> x_batch,
                              Adam &optimizer) {
  if (x_batch.empty()) throw std::invalid_argument("aae: empty batch");
  optimizer.ZeroGrad();
  Tape tape;
  Tensor loss;
  {
    Tape::Scope scope(tape);
    std::vector<Tensor> terms;
    for (const Tensor &x : x_batch)
      terms.push_back(ReconstructionLoss(x, Decode(params, Encode(params, x))));
    loss = Affine(Sum(ConcatRows(terms)),
                  1.0 / static_cast<double>(x_batch.size()));
  }
  Backward(loss, tape);
  optimizer.Step();
  return loss.item();
}

double AaeDiscriminatorPhase(AaeParams &params, std::span<const Tensor> x_batch,
                             Adam &optimizer, std::uint64_t seed) {
  if (x_batch.empty()) throw std::invalid_argument("aae: empty batch");
  std::vector<Tensor> latents;
  {
    Tape::NoGrad no_grad;
    for (const Tensor &x : x_batch) latents.push_back(Encode(params, x));
  }
  Tensor latent_rows = ConcatRows(latents);
  Tensor prior = SamplePrior(latent_rows.rows(), params.shape.latent_dim, seed);
  optimizer.ZeroGrad();
  Tape tape;
  Tensor loss;
  {
    Tape::Scope scope(tape);
    loss = DiscriminatorLoss(params, prior, latent_rows);
  }
  Backward(loss, tape);
  optimizer.Step();
  return loss.item();
}

double AaeGeneratorPhase(AaeParams &params, std::span<const Tensor> x_batch,
                         Adam &optimizer) {
  if (x_batch.empty()) throw std::invalid_argument("aae: empty batch");
  optimizer.ZeroGrad();
  Tape tape;
  Tensor loss;
  {
    Tape::Scope scope(tape);
    std::vector<Tensor> latents;
    for (const Tensor &x : x_batch) latents.push_back(Encode(params, x));
    loss = EncoderAdversarialLoss(params, ConcatRows(latents));
  }
  Backward(loss, tape);
  optimizer.Step();
  return loss.item();
}

AaeLosses AaeStep(AaeParams &params, std::span<const Tensor> x_batch,
                  AaeOptimizers &optimizers, std::uint64_t seed) {
  AaeLosses losses;
  losses.reconstruction =
      AaeReconstructionPhase(params, x_batch, optimizers.reconstruction);
  losses.discriminator =
      AaeDiscriminatorPhase(params, x_batch, optimizers.discriminator, seed);
  losses.generator = AaeGeneratorPhase(params, x_batch, optimizers.generator);
  return losses;
}

}  // namespace mcihn
