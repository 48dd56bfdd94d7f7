// src/config.cpp

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

#include "mcihn/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mcihn {

namespace {

std::string Trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ParseDouble(const std::string &key, const std::string &v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception &) {
    throw std::invalid_argument("config key '" + key +
                                "': expected a number, got '" + v + "'");
  }
}

std::uint64_t ParseUnsigned(const std::string &key, const std::string &v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw std::invalid_argument("config key '" + key +
                                "': expected a non-negative integer, got '" +
                                v + "'");
  return out;
}

bool ParseBool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config key '" + key +
                              "': expected a boolean, got '" + v + "'");
}

// Shortest text that parses back to the same double.
std::string Num(double d) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, res.ptr);
}

const char *Bool(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string AblationTag(Ablation a) {
  switch (a) {
    case Ablation::kFull: return "full";
    case Ablation::kVT: return "-VT";
    case Ablation::kVA: return "-VA";
    case Ablation::kTA: return "-TA";
    case Ablation::kNoAae: return "mcihn-1";
    case Ablation::kNoCgmm: return "mcihn-2";
  }
  return "?";
}

Ablation ParseAblation(const std::string &tag) {
  for (Ablation a : kAllAblations)
    if (AblationTag(a) == tag) return a;
  throw std::invalid_argument("unknown ablation tag '" + tag + "'");
}

std::vector<Modality> ActiveModalities(Ablation a) {
  switch (a) {
    case Ablation::kVT: return {Modality::kVisual, Modality::kText};
    case Ablation::kVA: return {Modality::kVisual, Modality::kAudio};
    case Ablation::kTA: return {Modality::kText, Modality::kAudio};
    default: return {Modality::kVisual, Modality::kText, Modality::kAudio};
  }
}

std::string ShapeText(const SeqShape &s) {
  return std::to_string(s.steps) + "x" + std::to_string(s.dim);
}

SeqShape ParseShapeText(const std::string &text) {
  const auto x = text.find('x');
  if (x == std::string::npos)
    throw std::invalid_argument("shape must look like TxD, got '" + text + "'");
  const std::uint64_t t = ParseUnsigned("shape", text.substr(0, x));
  const std::uint64_t d = ParseUnsigned("shape", text.substr(x + 1));
  if (t == 0 || d == 0 || t > UINT32_MAX || d > UINT32_MAX)
    throw std::invalid_argument("shape extents must be positive, got '" +
                                text + "'");
  return {static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(d)};
}

TrainConfig FullScaleConfig() {
  TrainConfig c;
  c.shapes = FullScaleShapes();
  c.latent_steps = 32;
  c.latent_dim = 256;
  c.heads = 8;
  return c;
}

void TrainConfig::Set(const std::string &key, const std::string &value) {
  const std::string v = Trim(value);
  if (key == "preset") {
    const TrainConfig p = v == "full"   ? FullScaleConfig()
                          : v == "desk" ? TrainConfig()
                                        : throw std::invalid_argument(
                                              "config key 'preset': expected "
                                              "desk or full, got '" + v + "'");
    shapes = p.shapes;
    latent_steps = p.latent_steps;
    latent_dim = p.latent_dim;
    heads = p.heads;
  } else if (key == "shape_v") {
    shapes[0] = ParseShapeText(v);
  } else if (key == "shape_t") {
    shapes[1] = ParseShapeText(v);
  } else if (key == "shape_a") {
    shapes[2] = ParseShapeText(v);
  } else if (key == "latent_steps") {
    latent_steps = ParseUnsigned(key, v);
  } else if (key == "latent_dim") {
    latent_dim = ParseUnsigned(key, v);
  } else if (key == "heads") {
    heads = ParseUnsigned(key, v);
  } else if (key == "lr_main") {
    lr_main = ParseDouble(key, v);
  } else if (key == "batch_size") {
    batch_size = ParseUnsigned(key, v);
  } else if (key == "dropout") {
    dropout = ParseDouble(key, v);
  } else if (key == "beta1") {
    beta1 = ParseDouble(key, v);
  } else if (key == "beta2") {
    beta2 = ParseDouble(key, v);
  } else if (key == "epsilon") {
    epsilon = ParseDouble(key, v);
  } else if (key == "max_epochs") {
    max_epochs = ParseUnsigned(key, v);
  } else if (key == "patience") {
    patience = ParseUnsigned(key, v);
  } else if (key == "shuffle") {
    shuffle = ParseBool(key, v);
  } else if (key == "adaptation") {
    adaptation = ParseBool(key, v);
  } else if (key == "adaptation_weight") {
    adaptation_weight = ParseDouble(key, v);
  } else if (key == "adaptation_layers") {
    adaptation_layers = ParseUnsigned(key, v);
  } else if (key == "ablation") {
    ablation = ParseAblation(v);
  } else if (key == "seed") {
    seed = ParseUnsigned(key, v);
  } else if (key == "mmd_kernel") {
    if (v == "linear")
      mmd_kernel = MmdKernel::kLinear;
    else if (v == "rbf")
      mmd_kernel = MmdKernel::kRbf;
    else
      throw std::invalid_argument("config key 'mmd_kernel': expected linear "
                                  "or rbf, got '" + v + "'");
  } else if (key == "rbf_bandwidth") {
    rbf_bandwidth = ParseDouble(key, v);
  } else if (key == "per_path_interaction") {
    per_path_interaction = ParseBool(key, v);
  } else if (key == "merge_updates") {
    merge_updates = ParseBool(key, v);
  } else if (key == "aae_activation") {
    if (v == "relu")
      aae_activation = Activation::kRelu;
    else if (v == "identity")
      aae_activation = Activation::kIdentity;
    else
      throw std::invalid_argument("config key 'aae_activation': expected "
                                  "relu or identity, got '" + v + "'");
  } else if (key == "class_head_enabled") {
    class_head_enabled = ParseBool(key, v);
  } else if (key == "num_classes") {
    num_classes = ParseUnsigned(key, v);
  } else if (key == "scheme") {
    scheme = ParseSchemeFamily(v);
  } else if (key == "acc2_drop_neutral") {
    acc2_drop_neutral = ParseBool(key, v);
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

void TrainConfig::Validate() const {
  auto fail = [](const std::string &msg) {
    throw std::invalid_argument("invalid config: " + msg);
  };
  if (!(lr_main > 0.0)) fail("lr_main must be > 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (patience < 1) fail("patience must be >= 1");
  if (max_epochs < 1) fail("max_epochs must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must be in [0, 1)");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    fail("betas must be in [0, 1)");
  if (!(epsilon > 0.0)) fail("epsilon must be > 0");
  if (latent_steps < 1 || latent_dim < 1) fail("latent shape must be positive");
  if (heads < 1 || latent_dim % heads != 0) fail("heads must divide latent_dim");
  if (adaptation_layers < 1) fail("adaptation_layers must be >= 1");
  if (!(adaptation_weight >= 0.0)) fail("adaptation_weight must be >= 0");
  if (class_head_enabled && num_classes < 2) fail("num_classes must be >= 2");
  for (const SeqShape &s : shapes)
    if (s.steps == 0 || s.dim == 0) fail("input shapes must be positive");
}

std::string TrainConfig::ToText() const {
  std::ostringstream os;
  os << "shape_v=" << ShapeText(shapes[0]) << '\n'
     << "shape_t=" << ShapeText(shapes[1]) << '\n'
     << "shape_a=" << ShapeText(shapes[2]) << '\n'
     << "latent_steps=" << latent_steps << '\n'
     << "latent_dim=" << latent_dim << '\n'
     << "heads=" << heads << '\n'
     << "lr_main=" << Num(lr_main) << '\n'
     << "batch_size=" << batch_size << '\n'
     << "dropout=" << Num(dropout) << '\n'
     << "beta1=" << Num(beta1) << '\n'
     << "beta2=" << Num(beta2) << '\n'
     << "epsilon=" << Num(epsilon) << '\n'
     << "max_epochs=" << max_epochs << '\n'
     << "patience=" << patience << '\n'
     << "shuffle=" << Bool(shuffle) << '\n'
     << "adaptation=" << (adaptation ? "on" : "off") << '\n'
     << "adaptation_weight=" << Num(adaptation_weight) << '\n'
     << "adaptation_layers=" << adaptation_layers << '\n'
     << "ablation=" << AblationTag(ablation) << '\n'
     << "seed=" << seed << '\n'
     << "mmd_kernel=" << (mmd_kernel == MmdKernel::kRbf ? "rbf" : "linear")
     << '\n'
     << "rbf_bandwidth=" << Num(rbf_bandwidth) << '\n'
     << "per_path_interaction=" << Bool(per_path_interaction) << '\n'
     << "merge_updates=" << Bool(merge_updates) << '\n'
     << "aae_activation="
     << (aae_activation == Activation::kRelu ? "relu" : "identity") << '\n'
     << "class_head_enabled=" << Bool(class_head_enabled) << '\n'
     << "num_classes=" << num_classes << '\n'
     << "scheme=" << SchemeFamilyName(scheme) << '\n'
     << "acc2_drop_neutral=" << Bool(acc2_drop_neutral) << '\n';
  return os.str();
}

TrainConfig ParseConfigText(const std::string &text, TrainConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value");
    base.Set(Trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

TrainConfig LoadConfigFile(const std::filesystem::path &path,
                           TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseConfigText(buf.str(), std::move(base));
}

}  // namespace mcihn
