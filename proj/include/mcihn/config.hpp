// include/mcihn/config.hpp

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

// Training configuration and its key=value text form.
//
// Recognized keys (defaults in brackets):
//   preset               desk | full; resets the shape keys below [desk]
//   shape_v/t/a          TxD input shapes [4x12 / 6x16 / 8x12]
//   latent_steps         T [8]        latent_dim    d [16]
//   heads                h [4]
//   lr_main              [0.001]      batch_size    [32]
//   dropout              [0.5]        beta1 / beta2 / epsilon [0.9/0.999/1e-8]
//   max_epochs           [300]        patience      [10]
//   shuffle              [true]
//   adaptation           on | off [on]
//   adaptation_weight    [1]; the joint loss is unweighted at 1
//   adaptation_layers    number of xi layers [1]
//   ablation             full | -VT | -VA | -TA | mcihn-1 | mcihn-2 [full]
//   seed                 [0]
//   mmd_kernel           linear | rbf [linear]
//   rbf_bandwidth        <= 0 selects the median heuristic [0]
//   per_path_interaction [false]
//   merge_updates        fold the reconstruction update into the joint
//                        update [false]
//   aae_activation       relu | identity [relu]
//   class_head_enabled   [false]      num_classes   [7]
//   scheme               mosi | sims metric family [mosi]
//   acc2_drop_neutral    [false]
//
// Only lr_main is used; there is no pretrained text encoder to fine-tune, so
// no separate encoder learning rate exists.

#ifndef MCIHN_CONFIG_HPP_
#define MCIHN_CONFIG_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mcihn/aae.hpp"
#include "mcihn/cgmm.hpp"
#include "mcihn/dataio.hpp"
#include "mcihn/metrics.hpp"

namespace mcihn {

enum class Ablation { kFull, kVT, kVA, kTA, kNoAae, kNoCgmm };
inline constexpr std::array<Ablation, 6> kAllAblations = {
    Ablation::kFull, Ablation::kVT,    Ablation::kVA,
    Ablation::kTA,   Ablation::kNoAae, Ablation::kNoCgmm};

std::string AblationTag(Ablation a);
Ablation ParseAblation(const std::string &tag);
/// Modalities fed to the model under an ablation tag.
std::vector<Modality> ActiveModalities(Ablation a);
inline bool UsesAae(Ablation a) { return a != Ablation::kNoAae; }
inline bool UsesCgmm(Ablation a) { return a != Ablation::kNoCgmm; }

struct TrainConfig {
  std::array<SeqShape, 3> shapes = DeskScaleShapes();
  std::size_t latent_steps = 8;
  std::size_t latent_dim = 16;
  std::size_t heads = 4;

  double lr_main = 1e-3;
  std::size_t batch_size = 32;
  double dropout = 0.5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  std::size_t max_epochs = 300;
  std::size_t patience = 10;
  bool shuffle = true;

  bool adaptation = true;
  double adaptation_weight = 1.0;
  std::size_t adaptation_layers = 1;
  Ablation ablation = Ablation::kFull;
  std::uint64_t seed = 0;
  MmdKernel mmd_kernel = MmdKernel::kLinear;
  double rbf_bandwidth = 0.0;
  bool per_path_interaction = false;
  bool merge_updates = false;
  Activation aae_activation = Activation::kRelu;
  bool class_head_enabled = false;
  std::size_t num_classes = 7;
  SchemeFamily scheme = SchemeFamily::kMosi;
  bool acc2_drop_neutral = false;

  /// Throws std::invalid_argument naming the offending key.
  void Validate() const;
  void Set(const std::string &key, const std::string &value);
  /// Every key, one "key=value" per line, in a fixed order.
  std::string ToText() const;

  bool operator==(const TrainConfig &) const = default;
};

/// Full-scale shapes with T=32, d=256, h=8.
TrainConfig FullScaleConfig();

/// Parses newline-delimited key=value pairs; '#' starts a comment.
TrainConfig ParseConfigText(const std::string &text,
                            TrainConfig base = TrainConfig());
TrainConfig LoadConfigFile(const std::filesystem::path &path,
                           TrainConfig base = TrainConfig());

std::string ShapeText(const SeqShape &s);
SeqShape ParseShapeText(const std::string &text);

}  // namespace mcihn

#endif  // MCIHN_CONFIG_HPP_
