// src/model.cpp

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

#include "mcihn/model.hpp"

#include <algorithm>

namespace mcihn {

namespace {

// Visits every tensor slot in the same order as ModelParams::Named().
template <typename F>
void ForEachTensor(ModelParams &p, F &&f) {
  for (AaeParams &a : p.aae)
    for (Tensor *t : {&a.enc_w, &a.enc_b, &a.enc_time, &a.dec_time, &a.dec_w,
                      &a.dec_b, &a.disc_w1, &a.disc_b1, &a.disc_w2, &a.disc_b2})
      f(*t);
  for (Tensor &t : p.cgmm.interaction) f(t);
  for (PairGateParams &g : p.cgmm.gates)
    for (Tensor *t : {&g.w, &g.b, &g.fuse_p, &g.fuse_q}) f(*t);
  for (std::size_t k = 0; k < p.cgmm.xi_w.size(); ++k) {
    f(p.cgmm.xi_w[k]);
    f(p.cgmm.xi_b[k]);
  }
  for (AttentionPath &path : p.ffm.paths) {
    for (AttentionHead &h : path.heads) {
      f(h.wq);
      f(h.wk);
      f(h.wv);
    }
    f(path.wo);
  }
  f(p.ffm.head_w);
  f(p.ffm.head_b);
  if (p.ffm.class_w.defined()) {
    f(p.ffm.class_w);
    f(p.ffm.class_b);
  }
}

void CopyValues(const Tensor &from, Tensor &to) {
  if (from.shape() != to.shape())
    throw ShapeError("parameter copy: " + ShapeToString(from.shape()) +
                     " vs " + ShapeToString(to.shape()));
  std::copy(from.data().begin(), from.data().end(), to.mutable_data().begin());
}

}  // namespace

ModelParams ModelParams::Init(const TrainConfig &config, std::uint64_t seed) {
  config.Validate();
  std::mt19937_64 rng(seed);
  ModelParams p;
  for (Modality m : kAllModalities) {
    AaeShape shape;
    shape.input = config.shapes[Index(m)];
    shape.latent_steps = config.latent_steps;
    shape.latent_dim = config.latent_dim;
    shape.disc_hidden = 4 * config.latent_dim;
    shape.activation = config.aae_activation;
    p.aae[Index(m)] = AaeParams::Init(shape, rng);
  }
  CgmmConfig cc;
  cc.dim = config.latent_dim;
  cc.adapt_dim = config.latent_dim;
  cc.adaptation_layers = config.adaptation_layers;
  cc.per_path_interaction = config.per_path_interaction;
  cc.kernel = config.mmd_kernel;
  cc.rbf_bandwidth = config.rbf_bandwidth;
  p.cgmm = CgmmParams::Init(cc, rng);
  FfmConfig fc;
  fc.dim = config.latent_dim;
  fc.heads = config.heads;
  fc.class_head_enabled = config.class_head_enabled;
  fc.num_classes = config.num_classes;
  fc.dropout = config.dropout;
  p.ffm = FfmParams::Init(fc, rng);
  return p;
}

std::vector<std::pair<std::string, Tensor>> ModelParams::Named() const {
  std::vector<std::pair<std::string, Tensor>> out;
  for (Modality m : kAllModalities)
    for (auto &nt : aae[Index(m)].Named(std::string("aae_") + ModalityLetter(m)))
      out.push_back(std::move(nt));
  for (auto &nt : cgmm.Named()) out.push_back(std::move(nt));
  for (auto &nt : ffm.Named()) out.push_back(std::move(nt));
  return out;
}

std::vector<Tensor> ModelParams::JointTrainable(const TrainConfig &config) const {
  const std::vector<Modality> active = ActiveModalities(config.ablation);
  std::vector<Tensor> out;
  for (Modality m : active) {
    for (const Tensor &t : aae[Index(m)].EncoderParams()) out.push_back(t);
    if (config.merge_updates && UsesAae(config.ablation))
      for (const Tensor &t : aae[Index(m)].DecoderParams()) out.push_back(t);
  }
  if (UsesCgmm(config.ablation))
    for (const Tensor &t : cgmm.All()) out.push_back(t);
  for (Modality m : active)
    for (const Tensor &t : ffm.PathParams(m)) out.push_back(t);
  for (const Tensor &t : ffm.HeadParams()) out.push_back(t);
  return out;
}

ModelParams ModelParams::Clone() const {
  ModelParams copy = *this;
  ForEachTensor(copy, [](Tensor &t) { t = t.Clone(); });
  return copy;
}

void ModelParams::AssignFrom(const ModelParams &other) {
  auto src = other.Named();
  auto dst = Named();
  if (src.size() != dst.size())
    throw ShapeError("parameter copy: tensor counts differ");
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i].first != dst[i].first)
      throw ShapeError("parameter copy: name mismatch " + src[i].first +
                       " vs " + dst[i].first);
    CopyValues(src[i].second, dst[i].second);
  }
}

std::vector<SampleTensors> ToTensors(const std::vector<ModalSample> &samples) {
  std::vector<SampleTensors> out;
  out.reserve(samples.size());
  for (const ModalSample &s : samples) {
    SampleTensors t;
    for (Modality m : kAllModalities) t.x[Index(m)] = ToTensor(s.x(m));
    t.label = s.label;
    out.push_back(std::move(t));
  }
  return out;
}

ForwardOutput Forward(const ModelParams &params, const TrainConfig &config,
                      std::span<const SampleTensors *const> batch,
                      std::mt19937_64 &rng, bool training) {
  if (batch.empty()) throw std::invalid_argument("forward: empty batch");
  const std::vector<Modality> active = ActiveModalities(config.ablation);
  const bool gated = UsesCgmm(config.ablation);

  ForwardOutput out;
  std::array<std::vector<Tensor>, 3> per_modality;
  for (const SampleTensors *sample : batch) {
    LatentTriple latents;
    for (Modality m : active) {
      latents[m] = Encode(params.aae[Index(m)], sample->x[Index(m)]);
      per_modality[Index(m)].push_back(latents[m]);
    }

    std::vector<Tensor> paths;
    if (gated) {
      JointReps joint = CgmmForward(params.cgmm, latents, active);
      for (Modality core : active) {
        std::vector<Tensor> feeds;
        for (Pair pair : kAllPairs) {
          auto [p, q] = PairMembers(pair);
          if ((p == core || q == core) && joint[pair].defined())
            feeds.push_back(joint[pair]);
        }
        paths.push_back(MultiheadPath(params.ffm, feeds.front(), feeds.back(),
                                      latents[core], core));
      }
    } else {
      for (Modality core : active) {
        std::vector<Tensor> others;
        for (Modality m : active)
          if (m != core) others.push_back(latents[m]);
        paths.push_back(MultiheadPath(params.ffm, others.front(), others.back(),
                                      latents[core], core));
      }
    }
    out.latents.push_back(latents);
    Prediction pred = FusePredict(params.ffm, paths, rng, training);
    out.scores.push_back(pred.score);
    if (pred.class_probs.defined()) out.class_probs.push_back(pred.class_probs);
  }

  for (Modality m : active)
    out.stacked_latents[m] = per_modality[Index(m)].size() == 1
                                 ? per_modality[Index(m)][0]
                                 : ConcatRows(per_modality[Index(m)]);

  if (gated && config.adaptation) {
    out.adaptation = AdaptationLoss(params.cgmm, out.stacked_latents, active);
    if (config.adaptation_weight != 1.0)
      out.adaptation = Affine(out.adaptation, config.adaptation_weight);
  } else {
    out.adaptation = Tensor::Scalar(0.0);
  }
  return out;
}

JointLosses ComputeJointLosses(const ForwardOutput &out,
                               std::span<const SampleTensors *const> batch) {
  std::vector<double> labels;
  labels.reserve(batch.size());
  for (const SampleTensors *s : batch) labels.push_back(s->label);
  JointLosses l;
  l.mul = MaeLoss(out.scores, labels);
  l.adp = out.adaptation;
  l.combined = CombinedLoss(l.mul, l.adp);
  return l;
}

std::vector<double> Predict(const ModelParams &params, const TrainConfig &config,
                            const std::vector<SampleTensors> &samples) {
  Tape::NoGrad no_grad;
  std::mt19937_64 unused(0);
  std::vector<double> scores;
  scores.reserve(samples.size());
  for (const SampleTensors &s : samples) {
    const SampleTensors *one[] = {&s};
    ForwardOutput out = Forward(params, config, one, unused, false);
    scores.push_back(out.scores[0].item());
  }
  return scores;
}

Tensor CombinedLossFn(const ModelParams &params, const TrainConfig &config,
                      std::span<const SampleTensors *const> batch) {
  std::mt19937_64 unused(0);
  ForwardOutput out = Forward(params, config, batch, unused, false);
  return ComputeJointLosses(out, batch).combined;
}

}  // namespace mcihn
