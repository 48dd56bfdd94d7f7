// tests/acceptance.cpp

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

// Acceptance suite. Prints one PASS or FAIL line per criterion with the
// measured quantity and the runtime against its budget. Exits nonzero when
// any criterion fails, unless that criterion is named with --allow-red.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcihn/train.hpp"
#include "oracles.hpp"

using namespace mcihn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  double budget_s;
  std::function<Outcome()> run;
};

oracle::Mat ToMat(const Tensor &t) {
  return oracle::Mat(t.rows(), t.cols(), std::vector<double>(t.data().begin(), t.data().end()));
}
Tensor FromMat(const oracle::Mat &m) { return Tensor({m.r, m.c}, m.v); }

double MaxAbsDiff(const Tensor &a, const oracle::Mat &b) {
  if (a.rows() != b.r || a.cols() != b.c) return 1e300;
  double m = 0.0;
  auto d = a.data();
  for (std::size_t i = 0; i < b.v.size(); ++i) m = std::max(m, std::fabs(d[i] - b.v[i]));
  return m;
}

Dataset Synth(std::size_t n, double rho, std::uint64_t seed, std::uint64_t pattern_seed) {
  SyntheticSpec spec;
  spec.count = n;
  spec.rho = rho;
  spec.seed = seed;
  spec.pattern_seed = pattern_seed;
  return {HeaderFor(spec), GenerateSynthetic(spec)};
}

std::string Fmt(const char *fmt, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

std::vector<char> FileBytes(const std::filesystem::path &p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

bool SameParams(const ModelParams &a, const ModelParams &b) {
  auto na = a.Named(), nb = b.Named();
  if (na.size() != nb.size()) return false;
  for (std::size_t i = 0; i < na.size(); ++i) {
    auto da = na[i].second.data(), db = nb[i].second.data();
    if (na[i].first != nb[i].first || na[i].second.shape() != nb[i].second.shape() ||
        !std::equal(da.begin(), da.end(), db.begin(), db.end()))
      return false;
  }
  return true;
}

// ------------------------------------------------------------ criteria

Outcome NotReproducible(const std::filesystem::path &readme) {
  std::ifstream is(readme);
  std::ostringstream os;
  os << is.rdbuf();
  const bool stated = os.str().find("not reproducible at desk scale") != std::string::npos;
  return {stated, stated ? "published benchmark figures need the real corpora and pretrained "
                           "extractors; README states this and the property suite replaces them"
                         : "README lacks the reproducibility statement"};
}

Outcome GradientIntegrity() {
  TrainConfig c;  // desk scale: T=8, d=16
  const double err = GradCheckModel(c, 2, 1, 1e-5);
  return {err < 1e-4, Fmt("max relative error %.3e over the combined loss (limit 1e-4)", err)};
}

Outcome OperatorOracles() {
  std::mt19937_64 rng(2024);
  const int n = 20;
  double e_mm = 0, e_sm = 0, e_mha = 0, e_gate = 0, e_mmd = 0, e_met = 0;
  for (int i = 0; i < n; ++i) {
    auto a = oracle::Random(8, 16, rng), b = oracle::Random(16, 12, rng);
    e_mm = std::max(e_mm, MaxAbsDiff(MatMul(FromMat(a), FromMat(b)), oracle::MatMul(a, b)));
    auto s = oracle::Random(8, 8, rng, -6, 6);
    e_sm = std::max(e_sm, MaxAbsDiff(RowSoftmax(FromMat(s)), oracle::SoftmaxRows(s)));

    FfmConfig fc;
    std::mt19937_64 prng(100 + i);
    FfmParams fp = FfmParams::Init(fc, prng);
    const Modality core = kAllModalities[i % 3];
    auto q = oracle::Random(8, 16, rng), k = oracle::Random(8, 16, rng), v = oracle::Random(8, 16, rng);
    const AttentionPath &path = fp.paths[Index(core)];
    std::vector<oracle::HeadWeights> heads;
    for (const AttentionHead &h : path.heads) heads.push_back({ToMat(h.wq), ToMat(h.wk), ToMat(h.wv)});
    e_mha = std::max(e_mha, MaxAbsDiff(MultiheadPath(fp, FromMat(q), FromMat(k), FromMat(v), core),
                                       oracle::MultiHead(q, k, v, heads, ToMat(path.wo), 16)));

    CgmmConfig cc;
    CgmmParams cp = CgmmParams::Init(cc, prng);
    const Pair pair = kAllPairs[i % 3];
    PairGateParams &g = cp.gates[Index(pair)];
    g.b = FromMat(oracle::Random(1, 16, rng));
    auto sp = oracle::Random(8, 16, rng), sq = oracle::Random(8, 16, rng);
    e_gate = std::max(e_gate, MaxAbsDiff(PairGate(cp, FromMat(sp), FromMat(sq), pair),
                                         oracle::PairGate(ToMat(g.w), ToMat(g.b), sp, sq)));

    auto w = oracle::Random(16, 16, rng), bb = oracle::Random(1, 16, rng);
    auto x = oracle::Random(8, 16, rng), y = oracle::Random(16, 16, rng, -0.5, 1.5);
    e_mmd = std::max(e_mmd, std::fabs(MmdSquared(FromMat(w), FromMat(bb), FromMat(x), FromMat(y), {}).item() -
                                      oracle::MmdLinear(w, bb, x, y)));
    const double sigma = i % 2 ? 0.0 : 2.5;
    e_mmd = std::max(e_mmd, std::fabs(MmdSquared(FromMat(w), FromMat(bb), FromMat(x), FromMat(y),
                                                 {MmdKernel::kRbf, sigma}).item() -
                                      oracle::MmdRbf(w, bb, x, y, sigma)));

    std::uniform_real_distribution<double> u(-1.2, 1.2);
    std::vector<double> pred(64), lab(64);
    for (std::size_t j = 0; j < 64; ++j) {
      pred[j] = u(rng);
      lab[j] = std::clamp(pred[j] + 0.6 * u(rng), -1.0, 1.0);
    }
    const MetricsReport r = Evaluate(pred, lab, {SchemeFamily::kSims});
    auto classes = [](const std::vector<double> &vals, const std::vector<double> &edges, int offset) {
      std::vector<int> out;
      for (double val : vals) out.push_back(oracle::Bin(val, edges) - offset);
      return out;
    };
    const std::vector<double> e2 = {0.0}, e3 = {-0.25, 0.25}, e5 = {-0.75, -0.25, 0.25, 0.75};
    auto p2 = classes(pred, e2, 0), l2 = classes(lab, e2, 0);
    e_met = std::max({e_met, std::fabs(*r.acc2 - oracle::Accuracy(p2, l2)),
                      std::fabs(r.f1 - oracle::WeightedF1(p2, l2)),
                      std::fabs(*r.acc3 - oracle::Accuracy(classes(pred, e3, 1), classes(lab, e3, 1))),
                      std::fabs(*r.acc5 - oracle::Accuracy(classes(pred, e5, 2), classes(lab, e5, 2))),
                      std::fabs(r.mae - oracle::Mae(pred, lab)),
                      std::fabs(r.corr - oracle::Pearson(pred, lab))});
    std::vector<double> e7;
    for (int k = 1; k <= 6; ++k) e7.push_back(-1.0 + 2.0 * k / 7.0);
    const MetricsReport r7 = Evaluate(pred, lab, {SchemeFamily::kMosi});
    e_met = std::max(e_met, std::fabs(*r7.acc7 - oracle::Accuracy(classes(pred, e7, 3), classes(lab, e7, 3))));
  }
  const bool ok = e_mm <= 1e-9 && e_sm <= 1e-9 && e_mha <= 1e-9 && e_gate <= 1e-9 &&
                  e_mmd <= 1e-9 && e_met <= 1e-6;
  std::ostringstream os;
  os << n << " instances each; max error matmul " << e_mm << ", softmax " << e_sm
     << ", attention " << e_mha << ", gate " << e_gate << ", mmd " << e_mmd
     << " (limit 1e-9); metrics " << e_met << " (limit 1e-6)";
  return {ok, os.str()};
}

Outcome MmdProperties() {
  std::mt19937_64 rng(77);
  int failures = 0;
  double worst_sym = 0, worst_zero = 0, min_val = 1e300;
  for (MmdKernel kernel : {MmdKernel::kLinear, MmdKernel::kRbf}) {
    for (int i = 0; i < 100; ++i) {
      CgmmConfig cc;
      cc.kernel = kernel;
      CgmmParams p = CgmmParams::Init(cc, rng);
      const std::size_t na = 4 + i % 13, nb = 4 + (i * 7) % 11;
      Tensor a = FromMat(oracle::Random(na, 16, rng, -2, 2));
      Tensor b = FromMat(oracle::Random(nb, 16, rng, -1, 3));
      const double ab = MmdSquared(p, a, b).item(), ba = MmdSquared(p, b, a).item();
      const double aa = MmdSquared(p, a, a).item();
      min_val = std::min({min_val, ab, ba});
      worst_sym = std::max(worst_sym, std::fabs(ab - ba));
      worst_zero = std::max(worst_zero, std::fabs(aa));
      if (ab < 0 || ba < 0 || std::fabs(ab - ba) > 1e-12 || std::fabs(aa) > 1e-12) ++failures;
    }
  }
  std::ostringstream os;
  os << "100 pairs per kernel (linear, rbf); violations " << failures << "; min value "
     << min_val << ", max |ab-ba| " << worst_sym << ", max |aa| " << worst_zero;
  return {failures == 0, os.str()};
}

// Trains a d=2 AAE on prior-distributed inputs, then fits a fresh probe
// discriminator and scores it on held-out prior and latent rows.
double ProbeAccuracy(std::uint64_t seed, int aae_steps) {
  AaeShape shape;
  shape.input = DeskScaleShapes()[Index(Modality::kVisual)];
  shape.latent_dim = 2;
  shape.disc_hidden = 8;
  std::mt19937_64 rng(seed);
  AaeParams p = AaeParams::Init(shape, rng);
  std::vector<Tensor> train, held;
  for (int i = 0; i < 256; ++i) train.push_back(RandomNormal(shape.input.steps, shape.input.dim, rng));
  for (int i = 0; i < 64; ++i) held.push_back(RandomNormal(shape.input.steps, shape.input.dim, rng));

  AaeOptimizers opt = AaeOptimizers::For(p, AdamConfig{});
  const std::size_t batch = 32;
  for (int step = 0; step < aae_steps; ++step) {
    std::span<const Tensor> b(train.data() + (step % 8) * batch, batch);
    AaeStep(p, b, opt, seed * 1000003 + static_cast<std::uint64_t>(step));
  }
  auto latents = [&](const std::vector<Tensor> &xs) {
    Tape::NoGrad no_grad;
    std::vector<Tensor> rows;
    for (const Tensor &x : xs) rows.push_back(Encode(p, x));
    return ConcatRows(rows);
  };
  const Tensor train_rows = latents(train), held_rows = latents(held);

  std::mt19937_64 probe_rng(seed ^ 0x9E3779B97F4A7C15ull);
  AaeParams probe = AaeParams::Init(shape, probe_rng);
  Adam probe_opt(probe.DiscriminatorParams(), AdamConfig{});
  const std::size_t chunk = 256, dim = shape.latent_dim;
  for (int s = 0; s < 500; ++s) {
    const std::size_t off = (static_cast<std::size_t>(s) % (train_rows.rows() / chunk)) * chunk;
    auto d = train_rows.data();
    Tensor slice({chunk, dim}, std::vector<double>(d.begin() + off * dim, d.begin() + (off + chunk) * dim));
    Tensor prior = SamplePrior(chunk, dim, seed * 7919 + static_cast<std::uint64_t>(s));
    probe_opt.ZeroGrad();
    Tape tape;
    Tensor loss;
    {
      Tape::Scope scope(tape);
      loss = DiscriminatorLoss(probe, prior, slice);
    }
    Backward(loss, tape);
    probe_opt.Step();
  }
  Tape::NoGrad no_grad;
  const Tensor prior = SamplePrior(held_rows.rows(), dim, seed * 104729 + 1);
  double correct = 0;
  const Tensor on_prior = Discriminate(probe, prior);
  const Tensor on_latent = Discriminate(probe, held_rows);
  for (double v : on_prior.data()) correct += v > 0.5;
  for (double v : on_latent.data()) correct += v < 0.5;
  return correct / static_cast<double>(2 * held_rows.rows());
}

Outcome AaeProbe() {
  int inside = 0;
  std::ostringstream os;
  os << "probe accuracy per seed:";
  double control = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const double acc = ProbeAccuracy(seed, 2000);
    inside += std::fabs(acc - 0.5) <= 0.15;
    os << ' ' << Fmt("%.3f", acc);
    control += ProbeAccuracy(seed, 0) / 5.0;
  }
  os << "; " << inside << "/5 within 0.5 +/- 0.15 (need 3); untrained-encoder control mean "
     << Fmt("%.3f", control);
  return {inside >= 3, os.str()};
}

Outcome LearningCheck() {
  int reached = 0;
  std::ostringstream os;
  os << "best train MAE per seed:";
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Dataset tr = Synth(32, 0.9, seed * 7, seed * 13);
    TrainConfig c;
    c.seed = seed;
    c.max_epochs = 300;
    c.patience = 300;
    const TrainResult r = Train(c, tr, tr);  // validation on the training set
    reached += r.checkpoint.best_val_mae < 0.05;
    os << ' ' << Fmt("%.4f", r.checkpoint.best_val_mae);
  }
  os << "; " << reached << "/5 below 0.05 (need 4)";
  return {reached >= 4, os.str()};
}

Outcome AblationDirection() {
  int wins = 0;
  std::ostringstream os;
  os << "best validation MAE full | mcihn-2 -VT -VA -TA:";
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Dataset tr = Synth(512, 0.5, seed * 101, seed * 31);
    const Dataset va = Synth(128, 0.5, seed * 101 + 1, seed * 31);
    std::vector<double> mae;
    for (Ablation a : {Ablation::kFull, Ablation::kNoCgmm, Ablation::kVT, Ablation::kVA, Ablation::kTA}) {
      TrainConfig c;
      c.seed = seed;
      c.ablation = a;
      mae.push_back(Train(c, tr, va).checkpoint.best_val_mae);
    }
    const bool win = std::all_of(mae.begin() + 1, mae.end(), [&](double m) { return mae[0] <= m; });
    wins += win;
    os << " [" << Fmt("%.4f", mae[0]) << " |";
    for (std::size_t i = 1; i < mae.size(); ++i) os << ' ' << Fmt("%.4f", mae[i]);
    os << ']';
  }
  os << "; full best in " << wins << "/5 seeds (need 3)";
  return {wins >= 3, os.str()};
}

Outcome DeterminismPersistence() {
  const Dataset tr = Synth(48, 0.6, 3, 4), va = Synth(16, 0.6, 5, 4);
  TrainConfig c;
  c.seed = 9;
  c.max_epochs = 5;
  c.batch_size = 16;
  const TrainResult a = Train(c, tr, va), b = Train(c, tr, va);
  const bool history = HistoryToJsonLines(a.history) == HistoryToJsonLines(b.history) &&
                       StepsToJsonLines(a.history) == StepsToJsonLines(b.history) &&
                       SameParams(a.checkpoint.params, b.checkpoint.params);

  const auto dir = std::filesystem::temp_directory_path() / "mcihn_acceptance";
  std::filesystem::create_directories(dir);
  SaveCheckpoint(dir / "a.bin", a.checkpoint);
  const Checkpoint back = LoadCheckpoint(dir / "a.bin");
  SaveCheckpoint(dir / "b.bin", back);
  const bool ckpt = SameParams(back.params, a.checkpoint.params) && back.config == c &&
                    back.epoch == a.checkpoint.epoch &&
                    back.best_val_mae == a.checkpoint.best_val_mae &&
                    FileBytes(dir / "a.bin") == FileBytes(dir / "b.bin");

  WriteFeatureFile(dir / "a.mcih", tr.header, tr.samples);
  const Dataset data = ReadFeatureFile(dir / "a.mcih");
  WriteFeatureFile(dir / "b.mcih", data.header, data.samples);
  const bool file = data.header == tr.header && data.samples == tr.samples &&
                    FileBytes(dir / "a.mcih") == FileBytes(dir / "b.mcih");
  std::filesystem::remove_all(dir);

  std::ostringstream os;
  os << "history identical: " << (history ? "yes" : "no")
     << "; checkpoint round trip bitwise: " << (ckpt ? "yes" : "no")
     << "; feature file round trip bitwise: " << (file ? "yes" : "no");
  return {history && ckpt && file, os.str()};
}

Outcome LossIdentity() {
  const Dataset tr = Synth(40, 0.6, 6, 7), va = Synth(12, 0.6, 8, 7);
  std::size_t steps = 0, bad = 0;
  for (Ablation a : kAllAblations) {
    TrainConfig c;
    c.seed = 4;
    c.ablation = a;
    c.max_epochs = 3;
    c.batch_size = 8;
    const TrainResult r = Train(c, tr, va);
    for (const StepRecord &s : r.history.steps) {
      ++steps;
      bad += s.l_combined != s.l_adp + s.l_mul;
    }
    for (const EpochRecord &e : r.history.epochs) bad += e.l_combined != e.l_adp + e.l_mul;
  }
  std::ostringstream os;
  os << steps << " logged steps over all six variants; mismatches " << bad;
  return {bad == 0 && steps > 0, os.str()};
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"mcihn acceptance suite"};
  app.name("mcihn-acceptance");
  std::vector<std::string> only, allow_red;
  std::string readme = MCIHN_README_PATH;
  app.add_option("--only", only, "run only these criteria");
  app.add_option("--allow-red", allow_red, "criteria whose failure does not fail the run");
  app.add_option("--readme", readme, "README checked for the reproducibility statement");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {"not_reproducible", 1, [&] { return NotReproducible(readme); }},
      {"gradient_integrity", 60, GradientIntegrity},
      {"operator_oracles", 30, OperatorOracles},
      {"mmd_properties", 10, MmdProperties},
      {"aae_adversarial", 300, AaeProbe},
      {"learning_check", 300, LearningCheck},
      {"ablation_direction", 1800, AblationDirection},
      {"determinism_persistence", 120, DeterminismPersistence},
      {"loss_identity", 60, LossIdentity},
  };
  const std::set<std::string> wanted(only.begin(), only.end());
  const std::set<std::string> tolerated(allow_red.begin(), allow_red.end());
  int hard_failures = 0;
  for (const Criterion &c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    std::printf("%s %s: %s; runtime %.1f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL",
                c.id.c_str(), o.detail.c_str(), secs, c.budget_s,
                in_time ? "" : " over budget");
    std::fflush(stdout);
    if (!pass && !tolerated.count(c.id)) ++hard_failures;
  }
  return hard_failures == 0 ? 0 : 1;
}
