// src/train.cpp

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

#include "mcihn/train.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"

namespace mcihn {

namespace {

using json = nlohmann::ordered_json;

std::uint64_t SplitMix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
  return SplitMix(SplitMix(SplitMix(a) ^ b) ^ c);
}

constexpr std::uint64_t kDropoutStream = 0xD50u;
constexpr std::uint64_t kShuffleStream = 0x5A1u;
constexpr std::uint64_t kPriorStream = 0x9A1u;

void CheckFinite(double v, const std::string &stage, const std::string &name) {
  if (!std::isfinite(v)) throw TrainError(stage, name + " is not finite");
}

// Runs `body`, turning numeric failures into a TrainError for `stage`.
template <typename F>
auto Guard(const std::string &stage, F &&body) {
  try {
    return body();
  } catch (const NumericError &e) {
    throw TrainError(stage, e.what());
  }
}

void CheckConforms(const TrainConfig &config, const Dataset &data,
                   const char *split) {
  if (data.samples.empty())
    throw DataError(DataErrorKind::kEmpty, std::string(split) + " set is empty");
  for (Modality m : kAllModalities)
    if (!(data.header.shapes[Index(m)] == config.shapes[Index(m)]))
      throw DataError(DataErrorKind::kShapeMismatch,
                      std::string(split) + " set modality " + ModalityLetter(m) +
                          " is " + ShapeText(data.header.shapes[Index(m)]) +
                          ", config expects " +
                          ShapeText(config.shapes[Index(m)]));
}

// ---- little-endian binary helpers ----

template <typename T>
void Put(std::ostream &os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(std::begin(b), std::end(b));
  os.write(reinterpret_cast<const char *>(b), sizeof(T));
}

template <typename T>
T Get(std::istream &is, const std::string &what) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char *>(b), sizeof(T)))
    throw std::runtime_error("checkpoint truncated reading " + what);
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(std::begin(b), std::end(b));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

void PutString(std::ostream &os, const std::string &s) {
  Put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string GetString(std::istream &is, const std::string &what) {
  const auto n = Get<std::uint32_t>(is, what);
  if (n > (1u << 24)) throw std::runtime_error("checkpoint: bad length for " + what);
  std::string s(n, '\0');
  if (n && !is.read(s.data(), n))
    throw std::runtime_error("checkpoint truncated reading " + what);
  return s;
}

json OptionalJson(const std::optional<double> &v) {
  return v ? json(*v) : json(nullptr);
}

// Fields averaged over seeds; optional accuracies stay null when absent.
MetricsReport MeanReport(const std::vector<MetricsReport> &reports) {
  MetricsReport mean = reports.front();
  const double k = static_cast<double>(reports.size());
  auto avg_opt = [&](std::optional<double> MetricsReport::*field) {
    if (!(reports.front().*field)) return;
    double s = 0.0;
    for (const auto &r : reports) s += *(r.*field);
    mean.*field = s / k;
  };
  avg_opt(&MetricsReport::acc2);
  avg_opt(&MetricsReport::acc3);
  avg_opt(&MetricsReport::acc5);
  avg_opt(&MetricsReport::acc7);
  double f1 = 0, mae = 0, corr = 0;
  bool defined = true;
  std::size_t clamped = 0;
  for (const auto &r : reports) {
    f1 += r.f1;
    mae += r.mae;
    corr += r.corr;
    defined = defined && r.corr_defined;
    clamped += r.clamped;
  }
  mean.f1 = f1 / k;
  mean.mae = mae / k;
  mean.corr = corr / k;
  mean.corr_defined = defined;
  mean.clamped = clamped;
  return mean;
}

}  // namespace

// ---------------------------------------------------------------- checkpoint

void SaveCheckpoint(const std::filesystem::path &path, const Checkpoint &ckpt) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(Checkpoint::kMagic, 4);
  Put<std::uint16_t>(os, Checkpoint::kVersion);
  PutString(os, ckpt.config.ToText());
  Put<std::uint32_t>(os, ckpt.epoch);
  Put<double>(os, ckpt.best_val_mae);
  Put<std::uint64_t>(os, ckpt.seed);
  const auto named = ckpt.params.Named();
  Put<std::uint32_t>(os, static_cast<std::uint32_t>(named.size()));
  for (const auto &[name, t] : named) {
    PutString(os, name);
    Put<std::uint32_t>(os, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t e : t.shape()) Put<std::uint64_t>(os, e);
    for (double v : t.data()) Put<double>(os, v);
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[4] = {};
  if (!is.read(magic, 4) || std::memcmp(magic, Checkpoint::kMagic, 4) != 0)
    throw std::runtime_error(path.string() + " is not a checkpoint (bad magic)");
  const auto version = Get<std::uint16_t>(is, "version");
  if (version != Checkpoint::kVersion)
    throw std::runtime_error("unsupported checkpoint version " +
                             std::to_string(version));
  Checkpoint ckpt;
  ckpt.config = ParseConfigText(GetString(is, "config"));
  ckpt.epoch = Get<std::uint32_t>(is, "epoch");
  ckpt.best_val_mae = Get<double>(is, "best_val_mae");
  ckpt.seed = Get<std::uint64_t>(is, "seed");
  ckpt.params = ModelParams::Init(ckpt.config, ckpt.seed);

  std::map<std::string, Tensor> slots;
  for (auto &[name, t] : ckpt.params.Named()) slots.emplace(name, t);
  const auto count = Get<std::uint32_t>(is, "tensor count");
  if (count != slots.size())
    throw std::runtime_error("checkpoint holds " + std::to_string(count) +
                             " tensors, model expects " +
                             std::to_string(slots.size()));
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = GetString(is, "tensor name");
    auto it = slots.find(name);
    if (it == slots.end())
      throw std::runtime_error("checkpoint has unknown tensor " + name);
    const auto rank = Get<std::uint32_t>(is, name);
    Shape shape(rank);
    for (auto &e : shape) e = static_cast<std::size_t>(Get<std::uint64_t>(is, name));
    if (shape != it->second.shape())
      throw ShapeError("checkpoint tensor " + name + " is " +
                       ShapeToString(shape) + ", model expects " +
                       ShapeToString(it->second.shape()));
    for (double &v : it->second.mutable_data()) v = Get<double>(is, name);
  }
  if (is.peek() != std::char_traits<char>::eof())
    throw std::runtime_error("checkpoint has trailing bytes");
  return ckpt;
}

// ---------------------------------------------------------------- history

std::string HistoryToJsonLines(const History &history) {
  std::string out;
  for (const EpochRecord &e : history.epochs) {
    json j;
    j["epoch"] = e.epoch;
    if (e.l_ae) {
      json ae;
      for (Modality m : kAllModalities)
        ae[std::string(1, ModalityLetter(m))] = (*e.l_ae)[Index(m)];
      j["l_ae"] = ae;
    } else {
      j["l_ae"] = nullptr;
    }
    j["l_disc"] = OptionalJson(e.l_disc);
    j["l_gen"] = OptionalJson(e.l_gen);
    j["l_adp"] = e.l_adp;
    j["l_mul"] = e.l_mul;
    j["l_combined"] = e.l_combined;
    j["val"] = json::parse(ReportToJson(e.val));
    j["best"] = e.epoch == history.best_epoch;
    out += j.dump() + "\n";
  }
  return out;
}

std::string StepsToJsonLines(const History &history) {
  std::string out;
  for (const StepRecord &s : history.steps) {
    json j;
    j["epoch"] = s.epoch;
    j["step"] = s.step;
    j["l_adp"] = s.l_adp;
    j["l_mul"] = s.l_mul;
    j["l_combined"] = s.l_combined;
    out += j.dump() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------- training

MetricsReport EvaluateParams(const ModelParams &params, const TrainConfig &config,
                             const Dataset &data) {
  CheckConforms(config, data, "evaluation");
  const std::vector<SampleTensors> samples = ToTensors(data.samples);
  const std::vector<double> scores =
      Guard("evaluate", [&] { return Predict(params, config, samples); });
  std::vector<double> labels;
  labels.reserve(samples.size());
  for (const auto &s : samples) labels.push_back(s.label);
  EvaluateOptions opts;
  opts.family = config.scheme;
  opts.acc2_drop_neutral = config.acc2_drop_neutral;
  return Evaluate(scores, labels, opts);
}

MetricsReport EvaluateCheckpoint(const Checkpoint &ckpt, const Dataset &data) {
  return EvaluateParams(ckpt.params, ckpt.config, data);
}

TrainResult Train(const TrainConfig &config, const Dataset &train,
                  const Dataset &valid) {
  config.Validate();
  CheckConforms(config, train, "training");
  CheckConforms(config, valid, "validation");

  const std::vector<SampleTensors> samples = ToTensors(train.samples);
  const std::vector<Modality> active = ActiveModalities(config.ablation);
  const bool use_aae = UsesAae(config.ablation);
  const bool merged = use_aae && config.merge_updates;

  ModelParams params = ModelParams::Init(config, config.seed);
  const AdamConfig adam{config.lr_main, config.beta1, config.beta2,
                        config.epsilon};
  std::vector<AaeOptimizers> aae_opt;
  for (Modality m : kAllModalities)
    aae_opt.push_back(AaeOptimizers::For(params.aae[Index(m)], adam));
  Adam joint(params.JointTrainable(config), adam);
  std::mt19937_64 dropout_rng(MixSeed(config.seed, kDropoutStream));

  TrainResult result;
  History &history = result.history;
  ModelParams best = params.Clone();
  double best_mae = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0, since_best = 0, global_step = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto batches =
        MakeBatches(samples.size(), config.batch_size,
                    MixSeed(config.seed, kShuffleStream, epoch), config.shuffle);
    std::array<double, 3> ae_sum{};
    double disc_sum = 0, gen_sum = 0, adp_sum = 0, mul_sum = 0;

    for (const auto &idx : batches) {
      ++global_step;
      std::vector<const SampleTensors *> batch;
      for (std::size_t i : idx) batch.push_back(&samples[i]);

      if (use_aae) {
        for (Modality m : active) {
          std::vector<Tensor> xs;
          for (const SampleTensors *s : batch) xs.push_back(s->x[Index(m)]);
          AaeParams &ap = params.aae[Index(m)];
          AaeOptimizers &opt = aae_opt[Index(m)];
          const std::string tag = std::string(1, ModalityLetter(m));
          if (!merged) {
            const double l = Guard("aae_reconstruction_" + tag, [&] {
              return AaeReconstructionPhase(ap, xs, opt.reconstruction);
            });
            CheckFinite(l, "aae_reconstruction_" + tag, "L_AE");
            ae_sum[Index(m)] += l;
          }
          const double ld = Guard("aae_discriminator_" + tag, [&] {
            return AaeDiscriminatorPhase(
                ap, xs, opt.discriminator,
                MixSeed(config.seed ^ kPriorStream, global_step, Index(m)));
          });
          CheckFinite(ld, "aae_discriminator_" + tag, "L_disc");
          const double lg = Guard("aae_generator_" + tag, [&] {
            return AaeGeneratorPhase(ap, xs, opt.generator);
          });
          CheckFinite(lg, "aae_generator_" + tag, "L_gen");
          disc_sum += ld;
          gen_sum += lg;
        }
      }

      joint.ZeroGrad();
      Tape tape;
      JointLosses losses;
      Tensor objective;
      std::array<double, 3> merged_ae{};
      Guard("joint_forward", [&] {
        Tape::Scope scope(tape);
        ForwardOutput out = Forward(params, config, batch, dropout_rng, true);
        losses = ComputeJointLosses(out, batch);
        objective = losses.combined;
        if (merged) {
          for (Modality m : active) {
            std::vector<Tensor> terms;
            for (std::size_t b = 0; b < batch.size(); ++b)
              terms.push_back(ReconstructionLoss(
                  batch[b]->x[Index(m)],
                  Decode(params.aae[Index(m)], out.latents[b][m])));
            Tensor l_ae = Affine(Sum(ConcatRows(terms)),
                                 1.0 / static_cast<double>(batch.size()));
            merged_ae[Index(m)] = l_ae.item();
            objective = Add(objective, l_ae);
          }
        }
        return 0;
      });
      const double l_mul = losses.mul.item(), l_adp = losses.adp.item();
      const double l_comb = losses.combined.item();
      CheckFinite(l_mul, "joint_forward", "L_mul");
      CheckFinite(l_adp, "joint_forward", "L_adp");
      CheckFinite(l_comb, "joint_forward", "L");
      Guard("joint_backward", [&] {
        Backward(objective, tape);
        for (const Tensor &p : joint.params())
          for (double g : p.grad())
            if (!std::isfinite(g)) throw NumericError("non-finite gradient");
        joint.Step();
        return 0;
      });
      for (Modality m : active) ae_sum[Index(m)] += merged_ae[Index(m)];
      adp_sum += l_adp;
      mul_sum += l_mul;
      history.steps.push_back({epoch, global_step, l_adp, l_mul, l_comb});
    }

    const double nb = static_cast<double>(batches.size());
    EpochRecord rec;
    rec.epoch = epoch;
    if (use_aae) {
      std::array<double, 3> means{};
      for (Modality m : active) means[Index(m)] = ae_sum[Index(m)] / nb;
      rec.l_ae = means;
      rec.l_disc = disc_sum / nb;
      rec.l_gen = gen_sum / nb;
    }
    rec.l_adp = adp_sum / nb;
    rec.l_mul = mul_sum / nb;
    rec.l_combined = rec.l_adp + rec.l_mul;
    rec.val = EvaluateParams(params, config, valid);
    CheckFinite(rec.val.mae, "validation", "MAE");
    history.epochs.push_back(rec);

    if (rec.val.mae < best_mae) {
      best_mae = rec.val.mae;
      best_epoch = epoch;
      best.AssignFrom(params);
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }

  history.best_epoch = best_epoch;
  result.checkpoint.config = config;
  result.checkpoint.params = std::move(best);
  result.checkpoint.epoch = static_cast<std::uint32_t>(best_epoch);
  result.checkpoint.best_val_mae = best_mae;
  result.checkpoint.seed = config.seed;
  return result;
}

// ---------------------------------------------------------------- suites

std::vector<AblationRow> RunAblationSuite(const TrainConfig &config,
                                          const Dataset &train,
                                          const Dataset &valid,
                                          const std::vector<std::uint64_t> &seeds) {
  if (seeds.empty()) throw std::invalid_argument("ablation: no seeds given");
  std::vector<AblationRow> rows;
  for (Ablation a : kAllAblations) {
    AblationRow row;
    row.ablation = a;
    for (std::uint64_t seed : seeds) {
      TrainConfig c = config;
      c.ablation = a;
      c.seed = seed;
      TrainResult r = Train(c, train, valid);
      row.per_seed.push_back(EvaluateCheckpoint(r.checkpoint, valid));
    }
    row.mean = MeanReport(row.per_seed);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string FormatAblationTable(const std::vector<AblationRow> &rows,
                                SchemeFamily family) {
  using Getter = double (*)(const MetricsReport &);
  struct Column {
    const char *name;
    Getter get;
    bool percent;
  };
  std::vector<Column> cols;
  cols.push_back({"Acc-2", [](const MetricsReport &r) { return r.acc2.value_or(NAN); }, true});
  cols.push_back({"F1", [](const MetricsReport &r) { return r.f1; }, true});
  if (family == SchemeFamily::kSims) {
    cols.push_back({"Acc-3", [](const MetricsReport &r) { return r.acc3.value_or(NAN); }, true});
    cols.push_back({"Acc-5", [](const MetricsReport &r) { return r.acc5.value_or(NAN); }, true});
  } else {
    cols.push_back({"Acc-7", [](const MetricsReport &r) { return r.acc7.value_or(NAN); }, true});
  }
  cols.push_back({"MAE", [](const MetricsReport &r) { return r.mae; }, false});
  cols.push_back({"Corr", [](const MetricsReport &r) { return r.corr; }, false});

  std::ostringstream os;
  os << std::left << std::setw(10) << "Model";
  for (const Column &c : cols) os << std::right << std::setw(9) << c.name;
  os << "\n";
  os << std::fixed;
  for (const AblationRow &row : rows) {
    os << std::left << std::setw(10) << AblationTag(row.ablation);
    for (const Column &c : cols) {
      const double v = c.get(row.mean);
      os << std::right << std::setw(9) << std::setprecision(c.percent ? 2 : 3)
         << (c.percent ? 100.0 * v : v);
    }
    os << "\n";
  }
  return os.str();
}

const std::vector<double> &SweepGrid() {
  static const std::vector<double> grid = {0.001, 0.01, 0.1, 0.3,
                                           0.5,   0.7,  0.9, 0.99};
  return grid;
}

std::vector<SweepPoint> RunSweep(const TrainConfig &config, const Dataset &train,
                                 const Dataset &valid, const std::string &key) {
  if (key != "dropout" && key != "adaptation_weight")
    throw std::invalid_argument("sweep key must be dropout or adaptation_weight, got " + key);
  std::vector<SweepPoint> points;
  for (double v : SweepGrid()) {
    TrainConfig c = config;
    if (key == "dropout")
      c.dropout = v;
    else
      c.adaptation_weight = v;
    TrainResult r = Train(c, train, valid);
    points.push_back({v, EvaluateCheckpoint(r.checkpoint, valid)});
  }
  return points;
}

double GradCheckModel(const TrainConfig &config, std::size_t batch,
                      std::uint64_t seed, double eps) {
  if (batch == 0) throw std::invalid_argument("gradcheck: batch must be positive");
  TrainConfig c = config;
  c.Validate();
  SyntheticSpec spec;
  spec.count = batch;
  spec.shapes = c.shapes;
  spec.seed = seed;
  spec.pattern_seed = seed;
  const Dataset data{HeaderFor(spec), GenerateSynthetic(spec)};
  const std::vector<SampleTensors> samples = ToTensors(data.samples);
  std::vector<const SampleTensors *> ptrs;
  for (const auto &s : samples) ptrs.push_back(&s);

  ModelParams params = ModelParams::Init(c, seed);
  std::vector<Tensor> theta = params.JointTrainable(c);
  return GradCheck([&] { return CombinedLossFn(params, c, ptrs); }, theta, eps);
}

}  // namespace mcihn
