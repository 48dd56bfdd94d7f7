// src/optim.cpp

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

#include "mcihn/optim.hpp"

#include <cmath>
#include <string>

namespace mcihn {

void AdamUpdate(std::span<Tensor> params, AdamState &state,
                const AdamConfig &config) {
  if (state.first_moment.empty() && state.step == 0) {
    for (const Tensor &p : params) {
      state.first_moment.emplace_back(p.numel(), 0.0);
      state.second_moment.emplace_back(p.numel(), 0.0);
    }
  }
  if (state.first_moment.size() != params.size())
    throw ShapeError("adam: state holds " +
                     std::to_string(state.first_moment.size()) +
                     " buffers for " + std::to_string(params.size()) +
                     " parameters");
  for (std::size_t i = 0; i < params.size(); ++i)
    if (state.first_moment[i].size() != params[i].numel() ||
        params[i].grad().size() != params[i].numel())
      throw ShapeError("adam: parameter " + std::to_string(i) + " " +
                       ShapeToString(params[i].shape()) +
                       " does not match its moment buffer or gradient");

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto theta = params[i].mutable_data();
    auto g = params[i].grad();
    auto &m = state.first_moment[i];
    auto &v = state.second_moment[i];
    for (std::size_t k = 0; k < theta.size(); ++k) {
      m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g[k];
      v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g[k] * g[k];
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      theta[k] -= config.lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

}  // namespace mcihn
