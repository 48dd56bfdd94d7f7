// include/mcihn/model.hpp

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

// The assembled network: three AAE encoders, the gate mechanism and the
// fusion module, with the ablation variants wired in.
//
// Attention path for core modality m uses the joint representations of the
// pairs that contain m, in vt/va/ta order: query = first pair, key = last
// pair, value = S^m. With the gate mechanism removed the two auxiliary
// latents take the query and key roles.

#ifndef MCIHN_MODEL_HPP_
#define MCIHN_MODEL_HPP_

#include <array>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcihn/aae.hpp"
#include "mcihn/cgmm.hpp"
#include "mcihn/config.hpp"
#include "mcihn/ffm.hpp"

namespace mcihn {

struct ModelParams {
  std::array<AaeParams, 3> aae;
  CgmmParams cgmm;
  FfmParams ffm;

  /// Glorot-uniform weights, zero biases, drawn from `seed`.
  static ModelParams Init(const TrainConfig &config, std::uint64_t seed);

  std::vector<std::pair<std::string, Tensor>> Named() const;
  /// Parameters that receive gradients from the joint loss under `config`.
  std::vector<Tensor> JointTrainable(const TrainConfig &config) const;
  /// Deep copy.
  ModelParams Clone() const;
  /// Copies every tensor's values from `other` into this object's storage.
  void AssignFrom(const ModelParams &other);
};

/// One sample's inputs as double-precision tensors.
struct SampleTensors {
  std::array<Tensor, 3> x;
  double label = 0.0;
};
std::vector<SampleTensors> ToTensors(const std::vector<ModalSample> &samples);

struct ForwardOutput {
  std::vector<Tensor> scores;       // 1 x 1 per sample
  std::vector<Tensor> class_probs;  // when the class head is enabled
  Tensor adaptation;                // scalar; constant 0 when not used
  std::vector<LatentTriple> latents;  // per sample
  LatentTriple stacked_latents;       // rows of every sample, per modality
};

ForwardOutput Forward(const ModelParams &params, const TrainConfig &config,
                      std::span<const SampleTensors *const> batch,
                      std::mt19937_64 &rng, bool training);

struct JointLosses {
  Tensor mul;
  Tensor adp;
  Tensor combined;
};
JointLosses ComputeJointLosses(const ForwardOutput &out,
                               std::span<const SampleTensors *const> batch);

/// Continuous scores for every sample, dropout off, no tape.
std::vector<double> Predict(const ModelParams &params, const TrainConfig &config,
                            const std::vector<SampleTensors> &samples);

/// Combined loss on `batch` as a function of the current parameter values
/// (dropout off). Used by gradient checks.
Tensor CombinedLossFn(const ModelParams &params, const TrainConfig &config,
                      std::span<const SampleTensors *const> batch);

}  // namespace mcihn

#endif  // MCIHN_MODEL_HPP_
