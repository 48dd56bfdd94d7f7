// src/cgmm.cpp

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

#include "mcihn/cgmm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcihn {

namespace {

void RequireLatent(const Tensor &t, const Tensor &like, const char *op) {
  if (t.shape() != like.shape())
    throw ShapeError(std::string(op) + ": latent shapes differ, " +
                     ShapeToString(like.shape()) + " vs " +
                     ShapeToString(t.shape()));
}

bool Contains(std::span<const Modality> set, Modality m) {
  return std::find(set.begin(), set.end(), m) != set.end();
}

}  // namespace

std::string PairName(Pair pair) {
  switch (pair) {
    case Pair::kVT: return "vt";
    case Pair::kVA: return "va";
    case Pair::kTA: return "ta";
  }
  return "?";
}

Pair ParsePair(const std::string &name) {
  for (Pair p : kAllPairs)
    if (PairName(p) == name) return p;
  throw std::invalid_argument("unknown modality pair '" + name + "'");
}

std::pair<Modality, Modality> PairMembers(Pair pair) {
  switch (pair) {
    case Pair::kVT: return {Modality::kVisual, Modality::kText};
    case Pair::kVA: return {Modality::kVisual, Modality::kAudio};
    case Pair::kTA: return {Modality::kText, Modality::kAudio};
  }
  throw std::invalid_argument("unknown modality pair");
}

CgmmParams CgmmParams::Init(const CgmmConfig &config, std::mt19937_64 &rng) {
  const std::size_t d = config.dim;
  if (config.adaptation_layers == 0)
    throw std::invalid_argument("cgmm: adaptation_layers must be >= 1");
  CgmmParams p;
  p.config = config;
  const std::size_t n_interaction = config.per_path_interaction ? 3 : 1;
  for (std::size_t i = 0; i < n_interaction; ++i)
    p.interaction.push_back(GlorotUniform(d, d, rng));
  for (PairGateParams &g : p.gates) {
    g.w = GlorotUniform(4 * d, d, rng);
    g.b = Tensor::Zeros(1, d, true);
    g.fuse_p = GlorotUniform(2 * d, d, rng);
    g.fuse_q = GlorotUniform(2 * d, d, rng);
  }
  for (std::size_t k = 0; k < config.adaptation_layers; ++k) {
    p.xi_w.push_back(GlorotUniform(d, config.adapt_dim, rng));
    p.xi_b.push_back(Tensor::Zeros(1, config.adapt_dim, true));
  }
  return p;
}

const Tensor &CgmmParams::InteractionFor(Modality core) const {
  return interaction.size() == 1 ? interaction[0] : interaction[Index(core)];
}

std::vector<Tensor> CgmmParams::All() const {
  std::vector<Tensor> out(interaction.begin(), interaction.end());
  for (const PairGateParams &g : gates)
    for (const Tensor &t : {g.w, g.b, g.fuse_p, g.fuse_q}) out.push_back(t);
  for (std::size_t k = 0; k < xi_w.size(); ++k) {
    out.push_back(xi_w[k]);
    out.push_back(xi_b[k]);
  }
  return out;
}

std::vector<std::pair<std::string, Tensor>> CgmmParams::Named() const {
  std::vector<std::pair<std::string, Tensor>> out;
  for (std::size_t i = 0; i < interaction.size(); ++i)
    out.emplace_back("cgmm.interaction" + std::to_string(i), interaction[i]);
  for (Pair p : kAllPairs) {
    const std::string base = "cgmm.gate_" + PairName(p);
    const PairGateParams &g = gates[Index(p)];
    out.emplace_back(base + ".w", g.w);
    out.emplace_back(base + ".b", g.b);
    out.emplace_back(base + ".fuse_p", g.fuse_p);
    out.emplace_back(base + ".fuse_q", g.fuse_q);
  }
  for (std::size_t k = 0; k < xi_w.size(); ++k) {
    out.emplace_back("cgmm.xi" + std::to_string(k) + ".w", xi_w[k]);
    out.emplace_back("cgmm.xi" + std::to_string(k) + ".b", xi_b[k]);
  }
  return out;
}

Tensor InteractionMatrix(const Tensor &w, const Tensor &s_core,
                         std::span<const Tensor> others) {
  if (others.empty())
    throw std::invalid_argument("interaction_matrix: no auxiliary latents");
  Tensor acc;
  for (const Tensor &o : others) {
    RequireLatent(o, s_core, "interaction_matrix");
    Tensor term = MatMul(w, Transpose(o));
    acc = acc.defined() ? Add(acc, term) : term;
  }
  return MatMul(s_core, acc);
}

Tensor InteractionMatrix(const CgmmParams &params, Modality core,
                         const Tensor &s_core, const Tensor &s_o1,
                         const Tensor &s_o2) {
  const Tensor others[] = {s_o1, s_o2};
  return InteractionMatrix(params.InteractionFor(core), s_core, others);
}

Tensor AttentionTransfer(const Tensor &m, const Tensor &s_core, Tensor *alpha) {
  if (m.rank() != 2 || m.rows() != m.cols() || m.rows() != s_core.rows())
    throw ShapeError("attention_transfer: interaction matrix " +
                     ShapeToString(m.shape()) + " does not fit latent " +
                     ShapeToString(s_core.shape()));
  Tensor a = RowSoftmax(m);
  if (alpha != nullptr) *alpha = a;
  return MatMul(Mul(a, m), s_core);
}

Tensor PairGate(const CgmmParams &params, const Tensor &s_p, const Tensor &s_q,
                Pair pair) {
  RequireLatent(s_q, s_p, "pair_gate");
  const PairGateParams &g = params.Gate(pair);
  Tensor joined = ConcatCols({s_p, s_q, Sub(s_p, s_q), Mul(s_p, s_q)});
  return Relu(AddRow(MatMul(joined, g.w), g.b));
}

Tensor JointRepresentation(const CgmmParams &params, const Tensor &a_p,
                           const Tensor &s_p, const Tensor &a_q,
                           const Tensor &s_q, const Tensor &gate, Pair pair) {
  const PairGateParams &g = params.Gate(pair);
  Tensor from_p = MatMul(ConcatCols({a_p, s_p}), g.fuse_p);
  Tensor from_q = MatMul(ConcatCols({a_q, s_q}), g.fuse_q);
  return Add(Mul(gate, from_p), Mul(gate, from_q));
}

double MedianBandwidth(const Tensor &a, const Tensor &b) {
  const Tensor parts[] = {a.Detach(), b.Detach()};
  Tensor pooled;
  {
    Tape::NoGrad no_grad;
    pooled = ConcatRows(parts);
  }
  const std::size_t n = pooled.rows(), c = pooled.cols();
  auto d = pooled.data();
  std::vector<double> dist;
  dist.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < c; ++k) {
        const double diff = d[i * c + k] - d[j * c + k];
        s += diff * diff;
      }
      if (s > 0.0) dist.push_back(std::sqrt(s));
    }
  if (dist.empty()) return 1.0;
  auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  return *mid;
}

Tensor MmdSquared(const Tensor &xi_w, const Tensor &xi_b,
                  const Tensor &core_rows, const Tensor &other_rows,
                  const MmdOptions &options) {
  if (core_rows.numel() == 0 || other_rows.numel() == 0)
    throw ShapeError("mmd: empty batch");
  Tensor x = AddRow(MatMul(core_rows, xi_w), xi_b);
  Tensor y = AddRow(MatMul(other_rows, xi_w), xi_b);
  if (options.kernel == MmdKernel::kLinear) {
    Tensor diff = Sub(MeanRows(x), MeanRows(y));
    return Sum(Mul(diff, diff));
  }
  const double sigma = options.rbf_bandwidth > 0.0 ? options.rbf_bandwidth
                                                   : MedianBandwidth(x, y);
  const double gamma = -1.0 / (2.0 * sigma * sigma);
  Tensor kxx = Mean(Exp(Affine(PairwiseSquaredDistance(x, x), gamma)));
  Tensor kyy = Mean(Exp(Affine(PairwiseSquaredDistance(y, y), gamma)));
  Tensor kxy = Mean(Exp(Affine(PairwiseSquaredDistance(x, y), gamma)));
  // Rounding can leave a tiny negative value; the true quantity is >= 0.
  return Relu(Sub(Add(kxx, kyy), Affine(kxy, 2.0)));
}

Tensor MmdSquared(const CgmmParams &params, const Tensor &core_rows,
                  const Tensor &other_rows, std::size_t layer) {
  return MmdSquared(params.xi_w.at(layer), params.xi_b.at(layer), core_rows,
                    other_rows,
                    {params.config.kernel, params.config.rbf_bandwidth});
}

Tensor AdaptationLoss(const CgmmParams &params, const LatentTriple &latents,
                      std::span<const Modality> active) {
  if (active.size() < 2)
    throw std::invalid_argument("adaptation_loss: needs two or more modalities");
  Tensor total;
  for (Modality core : active) {
    std::vector<Tensor> others;
    for (Modality m : active)
      if (m != core) others.push_back(latents[m]);
    Tensor other_rows = others.size() == 1 ? others[0] : ConcatRows(others);
    for (std::size_t k = 0; k < params.xi_w.size(); ++k) {
      Tensor term = MmdSquared(params, latents[core], other_rows, k);
      total = total.defined() ? Add(total, term) : term;
    }
  }
  return total;
}

Tensor AdaptationLoss(const CgmmParams &params, const LatentTriple &latents) {
  return AdaptationLoss(params, latents, kAllModalities);
}

JointReps CgmmForward(const CgmmParams &params, const LatentTriple &latents,
                      std::span<const Modality> active) {
  if (active.size() < 2)
    throw std::invalid_argument("cgmm: needs two or more modalities");
  LatentTriple transferred;
  for (Modality core : active) {
    std::vector<Tensor> others;
    for (Modality m : active)
      if (m != core) others.push_back(latents[m]);
    Tensor m = InteractionMatrix(params.InteractionFor(core), latents[core],
                                 others);
    transferred[core] = AttentionTransfer(m, latents[core]);
  }
  JointReps out;
  for (Pair pair : kAllPairs) {
    auto [p, q] = PairMembers(pair);
    if (!Contains(active, p) || !Contains(active, q)) continue;
    Tensor gate = PairGate(params, latents[p], latents[q], pair);
    out.f[Index(pair)] = JointRepresentation(
        params, transferred[p], latents[p], transferred[q], latents[q], gate,
        pair);
  }
  return out;
}

}  // namespace mcihn
