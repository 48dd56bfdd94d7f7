// include/mcihn/optim.hpp

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

#ifndef MCIHN_OPTIM_HPP_
#define MCIHN_OPTIM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "mcihn/tensor.hpp"

namespace mcihn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::uint64_t step = 0;
};

/// One bias-corrected Adam step on every tensor in `params`, reading each
/// tensor's grad buffer. Buffers are created on the first call; later calls
/// must present the same parameter shapes in the same order.
void AdamUpdate(std::span<Tensor> params, AdamState &state,
                const AdamConfig &config);

/// Adam bound to a fixed parameter list.
class Adam {
 public:
  Adam() = default;
  Adam(std::vector<Tensor> params, AdamConfig config)
      : params_(std::move(params)), config_(config) {}

  void Step() { AdamUpdate(params_, state_, config_); }
  void ZeroGrad() { ZeroGrads(params_); }

  std::vector<Tensor> &params() { return params_; }
  const AdamState &state() const { return state_; }
  const AdamConfig &config() const { return config_; }

 private:
  std::vector<Tensor> params_;
  AdamConfig config_;
  AdamState state_;
};

}  // namespace mcihn

#endif  // MCIHN_OPTIM_HPP_
