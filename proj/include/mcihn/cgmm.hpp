// include/mcihn/cgmm.hpp

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

// Cross-modal gate mechanism.
//
// For a core latent S_c and auxiliary latents S_o (all T x d):
//   M   = S_c * sum_o (W S_o^T)             interaction matrix, T x T
//   a   = row_softmax(M)
//   A~  = (a (.) M) * S_c                   transferred representation, T x d
// For a modality pair (p, q):
//   G   = relu([S_p, S_q, S_p - S_q, S_p (.) S_q] W_pq + b_pq)
//   F   = G (.) ([A~_p, S_p] Wf_p) + G (.) ([A~_q, S_q] Wf_q)
// Adaptation: squared MMD between xi-mapped rows of each core latent and the
// pooled rows of the other latents, summed over cores and xi layers.

#ifndef MCIHN_CGMM_HPP_
#define MCIHN_CGMM_HPP_

#include <array>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcihn/dataio.hpp"
#include "mcihn/tensor.hpp"

namespace mcihn {

enum class Pair : std::uint8_t { kVT = 0, kVA = 1, kTA = 2 };
inline constexpr std::array<Pair, 3> kAllPairs = {Pair::kVT, Pair::kVA,
                                                  Pair::kTA};
std::string PairName(Pair pair);
/// Accepts "vt", "va", "ta"; throws std::invalid_argument otherwise.
Pair ParsePair(const std::string &name);
std::pair<Modality, Modality> PairMembers(Pair pair);
inline constexpr std::size_t Index(Pair p) { return static_cast<std::size_t>(p); }

enum class MmdKernel { kLinear, kRbf };

struct CgmmConfig {
  std::size_t dim = 16;        // d
  std::size_t adapt_dim = 16;  // output width of xi
  std::size_t adaptation_layers = 1;
  bool per_path_interaction = false;
  MmdKernel kernel = MmdKernel::kLinear;
  double rbf_bandwidth = 0.0;  // <= 0 selects the median heuristic
};

struct PairGateParams {
  Tensor w;       // 4d x d
  Tensor b;       // 1 x d
  Tensor fuse_p;  // 2d x d
  Tensor fuse_q;  // 2d x d
};

struct CgmmParams {
  CgmmConfig config;
  std::vector<Tensor> interaction;  // one shared d x d, or one per core
  std::array<PairGateParams, 3> gates;
  std::vector<Tensor> xi_w;  // per adaptation layer, d x adapt_dim
  std::vector<Tensor> xi_b;  // per adaptation layer, 1 x adapt_dim

  static CgmmParams Init(const CgmmConfig &config, std::mt19937_64 &rng);

  const Tensor &InteractionFor(Modality core) const;
  const PairGateParams &Gate(Pair pair) const { return gates[Index(pair)]; }
  std::vector<Tensor> All() const;
  std::vector<std::pair<std::string, Tensor>> Named() const;
};

/// M = s_core * sum_o (w * s_o^T).
Tensor InteractionMatrix(const Tensor &w, const Tensor &s_core,
                         std::span<const Tensor> others);
Tensor InteractionMatrix(const CgmmParams &params, Modality core,
                         const Tensor &s_core, const Tensor &s_o1,
                         const Tensor &s_o2);

/// (row_softmax(m) (.) m) * s_core. The softmax weights are written to
/// `alpha` when it is non-null.
Tensor AttentionTransfer(const Tensor &m, const Tensor &s_core,
                         Tensor *alpha = nullptr);

Tensor PairGate(const CgmmParams &params, const Tensor &s_p, const Tensor &s_q,
                Pair pair);

Tensor JointRepresentation(const CgmmParams &params, const Tensor &a_p,
                           const Tensor &s_p, const Tensor &a_q,
                           const Tensor &s_q, const Tensor &gate, Pair pair);

struct MmdOptions {
  MmdKernel kernel = MmdKernel::kLinear;
  double rbf_bandwidth = 0.0;
};

/// Squared MMD between the xi-mapped rows of two batches. Linear kernel:
/// |mean xi(core) - mean xi(other)|^2. RBF kernel: biased (V-statistic)
/// estimate with exp(-|x - y|^2 / (2 sigma^2)).
Tensor MmdSquared(const Tensor &xi_w, const Tensor &xi_b,
                  const Tensor &core_rows, const Tensor &other_rows,
                  const MmdOptions &options);
Tensor MmdSquared(const CgmmParams &params, const Tensor &core_rows,
                  const Tensor &other_rows, std::size_t layer = 0);

/// Median of pairwise distances over the pooled rows; 1 when all coincide.
double MedianBandwidth(const Tensor &a, const Tensor &b);

/// Latent codes per modality; inactive modalities stay undefined.
struct LatentTriple {
  std::array<Tensor, 3> s;
  const Tensor &operator[](Modality m) const { return s[Index(m)]; }
  Tensor &operator[](Modality m) { return s[Index(m)]; }
};

/// Sum over active cores and adaptation layers of MMD^2(core rows, rows of
/// the remaining active latents). Latents may stack several samples.
Tensor AdaptationLoss(const CgmmParams &params, const LatentTriple &latents,
                      std::span<const Modality> active);
Tensor AdaptationLoss(const CgmmParams &params, const LatentTriple &latents);

/// Joint representations F_pq for every pair inside `active`.
struct JointReps {
  std::array<Tensor, 3> f;
  const Tensor &operator[](Pair p) const { return f[Index(p)]; }
};

JointReps CgmmForward(const CgmmParams &params, const LatentTriple &latents,
                      std::span<const Modality> active);

}  // namespace mcihn

#endif  // MCIHN_CGMM_HPP_
