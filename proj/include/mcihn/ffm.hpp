// include/mcihn/ffm.hpp

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

// Feature fusion: one multi-head attention path per core modality, additive
// fusion, mean pooling over time and a linear scoring head.

#ifndef MCIHN_FFM_HPP_
#define MCIHN_FFM_HPP_

#include <array>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcihn/dataio.hpp"
#include "mcihn/tensor.hpp"

namespace mcihn {

struct FfmConfig {
  std::size_t dim = 16;
  std::size_t heads = 4;
  bool class_head_enabled = false;
  std::size_t num_classes = 7;
  double dropout = 0.5;
};

struct AttentionHead {
  Tensor wq, wk, wv;  // d x d/h each
};

struct AttentionPath {
  std::vector<AttentionHead> heads;
  Tensor wo;  // d x d
};

struct FfmParams {
  FfmConfig config;
  std::array<AttentionPath, 3> paths;  // indexed by core modality
  Tensor head_w;  // d x 1
  Tensor head_b;  // 1 x 1
  Tensor class_w;  // d x C, only when the class head is enabled
  Tensor class_b;

  /// Throws std::invalid_argument when heads does not divide dim.
  static FfmParams Init(const FfmConfig &config, std::mt19937_64 &rng);

  std::vector<Tensor> PathParams(Modality core) const;
  std::vector<Tensor> HeadParams() const;
  std::vector<std::pair<std::string, Tensor>> Named() const;
};

/// Per head: softmax((q Wq)(k Wk)^T / sqrt(d / h)) (v Wv); heads are
/// concatenated and projected by Wo. Per-head attention weights are appended
/// to `attention` when non-null.
Tensor MultiheadPath(const FfmParams &params, const Tensor &q_in,
                     const Tensor &k_in, const Tensor &v_in, Modality core,
                     std::vector<Tensor> *attention = nullptr);

struct Prediction {
  Tensor score;        // 1 x 1
  Tensor class_probs;  // 1 x C when the class head is enabled
};

/// Sums the path outputs, applies dropout (training only), mean-pools over
/// time and scores with the linear head.
Prediction FusePredict(const FfmParams &params, std::span<const Tensor> paths,
                       std::mt19937_64 &rng, bool training);
Prediction FusePredict(const FfmParams &params, const Tensor &f_v,
                       const Tensor &f_t, const Tensor &f_a);

/// (1/N) sum |score_i - label_i|. Scores are 1 x 1 tensors.
Tensor MaeLoss(std::span<const Tensor> scores, std::span<const double> labels);

/// Unweighted sum, adp + mul.
Tensor CombinedLoss(const Tensor &mul, const Tensor &adp);

}  // namespace mcihn

#endif  // MCIHN_FFM_HPP_
