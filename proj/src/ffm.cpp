// src/ffm.cpp

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

#include "mcihn/ffm.hpp"

#include <cmath>
#include <stdexcept>

namespace mcihn {

FfmParams FfmParams::Init(const FfmConfig &config, std::mt19937_64 &rng) {
  const std::size_t d = config.dim, h = config.heads;
  if (h == 0 || d % h != 0)
    throw std::invalid_argument("ffm: heads (" + std::to_string(h) +
                                ") must divide dim (" + std::to_string(d) + ")");
  FfmParams p;
  p.config = config;
  for (AttentionPath &path : p.paths) {
    for (std::size_t i = 0; i < h; ++i)
      path.heads.push_back({GlorotUniform(d, d / h, rng),
                            GlorotUniform(d, d / h, rng),
                            GlorotUniform(d, d / h, rng)});
    path.wo = GlorotUniform(d, d, rng);
  }
  p.head_w = GlorotUniform(d, 1, rng);
  p.head_b = Tensor::Zeros(1, 1, true);
  if (config.class_head_enabled) {
    if (config.num_classes < 2)
      throw std::invalid_argument("ffm: num_classes must be >= 2");
    p.class_w = GlorotUniform(d, config.num_classes, rng);
    p.class_b = Tensor::Zeros(1, config.num_classes, true);
  }
  return p;
}

std::vector<Tensor> FfmParams::PathParams(Modality core) const {
  const AttentionPath &path = paths[Index(core)];
  std::vector<Tensor> out;
  for (const AttentionHead &h : path.heads) {
    out.push_back(h.wq);
    out.push_back(h.wk);
    out.push_back(h.wv);
  }
  out.push_back(path.wo);
  return out;
}

// The class head is prediction-only and never receives gradients, so it is
// left out of the trainable list.
std::vector<Tensor> FfmParams::HeadParams() const { return {head_w, head_b}; }

std::vector<std::pair<std::string, Tensor>> FfmParams::Named() const {
  std::vector<std::pair<std::string, Tensor>> out;
  for (Modality m : kAllModalities) {
    const std::string base = std::string("ffm.path_") + ModalityLetter(m);
    const AttentionPath &path = paths[Index(m)];
    for (std::size_t i = 0; i < path.heads.size(); ++i) {
      const std::string hb = base + ".head" + std::to_string(i);
      out.emplace_back(hb + ".wq", path.heads[i].wq);
      out.emplace_back(hb + ".wk", path.heads[i].wk);
      out.emplace_back(hb + ".wv", path.heads[i].wv);
    }
    out.emplace_back(base + ".wo", path.wo);
  }
  out.emplace_back("ffm.head_w", head_w);
  out.emplace_back("ffm.head_b", head_b);
  if (class_w.defined()) {
    out.emplace_back("ffm.class_w", class_w);
    out.emplace_back("ffm.class_b", class_b);
  }
  return out;
}

Tensor MultiheadPath(const FfmParams &params, const Tensor &q_in,
                     const Tensor &k_in, const Tensor &v_in, Modality core,
                     std::vector<Tensor> *attention) {
  if (q_in.shape() != k_in.shape() || q_in.shape() != v_in.shape())
    throw ShapeError("multihead_path: inputs differ, " +
                     ShapeToString(q_in.shape()) + ", " +
                     ShapeToString(k_in.shape()) + ", " +
                     ShapeToString(v_in.shape()));
  const AttentionPath &path = params.paths[Index(core)];
  const double d_k = static_cast<double>(params.config.dim);
  const double h = static_cast<double>(params.config.heads);
  const double inv_scale = 1.0 / std::sqrt(d_k / h);
  std::vector<Tensor> outputs;
  outputs.reserve(path.heads.size());
  for (const AttentionHead &head : path.heads) {
    Tensor scores = Affine(
        MatMul(MatMul(q_in, head.wq), Transpose(MatMul(k_in, head.wk))),
        inv_scale);
    Tensor weights = RowSoftmax(scores);
    if (attention != nullptr) attention->push_back(weights);
    outputs.push_back(MatMul(weights, MatMul(v_in, head.wv)));
  }
  return MatMul(ConcatCols(outputs), path.wo);
}

Prediction FusePredict(const FfmParams &params, std::span<const Tensor> paths,
                       std::mt19937_64 &rng, bool training) {
  if (paths.empty()) throw std::invalid_argument("fuse_predict: no paths");
  Tensor sum = paths[0];
  for (std::size_t i = 1; i < paths.size(); ++i) sum = Add(sum, paths[i]);
  Tensor pooled = MeanRows(Dropout(sum, params.config.dropout, rng, training));
  Prediction out;
  out.score = AddRow(MatMul(pooled, params.head_w), params.head_b);
  if (params.class_w.defined()) {
    Tape::NoGrad no_grad;
    out.class_probs =
        RowSoftmax(AddRow(MatMul(pooled.Detach(), params.class_w), params.class_b));
  }
  return out;
}

Prediction FusePredict(const FfmParams &params, const Tensor &f_v,
                       const Tensor &f_t, const Tensor &f_a) {
  std::mt19937_64 unused(0);
  const Tensor paths[] = {f_v, f_t, f_a};
  return FusePredict(params, paths, unused, /*training=*/false);
}

Tensor MaeLoss(std::span<const Tensor> scores, std::span<const double> labels) {
  if (scores.size() != labels.size())
    throw ShapeError("mae_loss: " + std::to_string(scores.size()) +
                     " scores vs " + std::to_string(labels.size()) + " labels");
  if (scores.empty()) throw ShapeError("mae_loss: empty batch");
  Tensor stacked = ConcatRows(scores);
  Tensor target({scores.size(), 1},
                std::vector<double>(labels.begin(), labels.end()));
  return Mean(Abs(Sub(stacked, target)));
}

Tensor CombinedLoss(const Tensor &mul, const Tensor &adp) {
  return Add(adp, mul);
}

}  // namespace mcihn
