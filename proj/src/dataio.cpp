// src/dataio.cpp

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

#include "mcihn/dataio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

#include "json.hpp"

namespace mcihn {

namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

template <typename T>
T ByteSwapIfBig(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

class LeWriter {
 public:
  explicit LeWriter(std::ofstream &out) : out_(out) {}
  template <typename T>
  void Put(T v) {
    v = ByteSwapIfBig(v);
    out_.write(reinterpret_cast<const char *>(&v), sizeof(T));
  }
  void PutFloats(const std::vector<float> &v) {
    if constexpr (std::endian::native == std::endian::little) {
      out_.write(reinterpret_cast<const char *>(v.data()),
                 static_cast<std::streamsize>(v.size() * sizeof(float)));
    } else {
      for (float f : v) Put(f);
    }
  }

 private:
  std::ofstream &out_;
};

class LeReader {
 public:
  explicit LeReader(std::ifstream &in) : in_(in) {}
  template <typename T>
  bool Get(T &v) {
    if (!in_.read(reinterpret_cast<char *>(&v), sizeof(T))) return false;
    v = ByteSwapIfBig(v);
    return true;
  }
  bool GetFloats(std::vector<float> &v) {
    if (!in_.read(reinterpret_cast<char *>(v.data()),
                  static_cast<std::streamsize>(v.size() * sizeof(float))))
      return false;
    if constexpr (std::endian::native == std::endian::big)
      for (float &f : v) f = ByteSwapIfBig(f);
    return true;
  }
  bool AtEnd() { return in_.peek() == std::ifstream::traits_type::eof(); }

 private:
  std::ifstream &in_;
};

std::string ShapeText(std::uint32_t r, std::uint32_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

char ModalityLetter(Modality m) {
  switch (m) {
    case Modality::kVisual: return 'v';
    case Modality::kText: return 't';
    case Modality::kAudio: return 'a';
  }
  return '?';
}

std::string LabelSchemeName(LabelScheme scheme) {
  return scheme == LabelScheme::kSims5 ? "sims5" : "mosi7";
}

LabelScheme ParseLabelScheme(const std::string &name) {
  if (name == "mosi7") return LabelScheme::kMosi7;
  if (name == "sims5") return LabelScheme::kSims5;
  throw std::invalid_argument("unknown label scheme '" + name + "'");
}

std::array<SeqShape, 3> FullScaleShapes() {
  return {SeqShape{10, 512}, SeqShape{36, 768}, SeqShape{128, 512}};
}

std::array<SeqShape, 3> DeskScaleShapes() {
  return {SeqShape{4, 12}, SeqShape{6, 16}, SeqShape{8, 12}};
}

const char *DataErrorKindName(DataErrorKind kind) {
  switch (kind) {
    case DataErrorKind::kIo: return "io";
    case DataErrorKind::kBadMagic: return "bad-magic";
    case DataErrorKind::kBadVersion: return "bad-version";
    case DataErrorKind::kBadHeader: return "bad-header";
    case DataErrorKind::kTruncated: return "truncated";
    case DataErrorKind::kLabelOutOfRange: return "label-out-of-range";
    case DataErrorKind::kShapeMismatch: return "shape-mismatch";
    case DataErrorKind::kCountMismatch: return "count-mismatch";
    case DataErrorKind::kEmpty: return "empty";
  }
  return "unknown";
}

void CheckSample(const DatasetHeader &header, const ModalSample &sample,
                 std::size_t index) {
  for (Modality m : kAllModalities) {
    const FeatureMatrix &x = sample.x(m);
    const SeqShape &want = header.shapes[Index(m)];
    if (x.rows != want.steps || x.cols != want.dim ||
        x.values.size() != static_cast<std::size_t>(x.rows) * x.cols)
      throw DataError(DataErrorKind::kShapeMismatch,
                      "sample " + std::to_string(index) + " modality " +
                          ModalityLetter(m) + ": expected " +
                          ShapeText(want.steps, want.dim) + ", got " +
                          ShapeText(x.rows, x.cols) + " (" +
                          std::to_string(x.values.size()) + " values)");
  }
  if (!(sample.label >= -1.0f && sample.label <= 1.0f))
    throw DataError(DataErrorKind::kLabelOutOfRange,
                    "sample " + std::to_string(index) + ": label " +
                        std::to_string(sample.label) + " outside [-1, 1]");
}

void WriteFeatureFile(const std::filesystem::path &path,
                      const DatasetHeader &header,
                      const std::vector<ModalSample> &samples) {
  if (header.sample_count != samples.size())
    throw DataError(DataErrorKind::kCountMismatch,
                    "header declares " + std::to_string(header.sample_count) +
                        " samples, got " + std::to_string(samples.size()));
  for (const SeqShape &s : header.shapes)
    if (s.steps == 0 || s.dim == 0)
      throw DataError(DataErrorKind::kBadHeader, "zero extent in header");
  for (std::size_t i = 0; i < samples.size(); ++i)
    CheckSample(header, samples[i], i);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw DataError(DataErrorKind::kIo, "cannot open " + path.string());
  out.write(DatasetHeader::kMagic, 4);
  LeWriter w(out);
  w.Put(DatasetHeader::kVersion);
  for (const SeqShape &s : header.shapes) {
    w.Put(s.steps);
    w.Put(s.dim);
  }
  w.Put(header.sample_count);
  w.Put(static_cast<std::uint32_t>(header.scheme));
  for (const ModalSample &s : samples) {
    w.Put(s.label);
    for (const FeatureMatrix &x : s.features) w.PutFloats(x.values);
  }
  if (!out)
    throw DataError(DataErrorKind::kIo, "write failed on " + path.string());
}

Dataset ReadFeatureFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError(DataErrorKind::kIo, "cannot open " + path.string());
  char magic[4] = {};
  if (!in.read(magic, 4) ||
      std::memcmp(magic, DatasetHeader::kMagic, 4) != 0)
    throw DataError(DataErrorKind::kBadMagic,
                    path.string() + ": missing MCIH magic tag");
  LeReader r(in);
  std::uint16_t version = 0;
  if (!r.Get(version))
    throw DataError(DataErrorKind::kTruncated, "truncated in header");
  if (version != DatasetHeader::kVersion)
    throw DataError(DataErrorKind::kBadVersion,
                    "unsupported format version " + std::to_string(version));
  Dataset ds;
  std::uint32_t scheme = 0;
  for (SeqShape &s : ds.header.shapes)
    if (!r.Get(s.steps) || !r.Get(s.dim))
      throw DataError(DataErrorKind::kTruncated, "truncated in header");
  if (!r.Get(ds.header.sample_count) || !r.Get(scheme))
    throw DataError(DataErrorKind::kTruncated, "truncated in header");
  for (const SeqShape &s : ds.header.shapes)
    if (s.steps == 0 || s.dim == 0)
      throw DataError(DataErrorKind::kBadHeader, "zero extent in header");
  if (ds.header.sample_count == 0)
    throw DataError(DataErrorKind::kBadHeader, "sample count is zero");
  if (scheme > 1)
    throw DataError(DataErrorKind::kBadHeader,
                    "unknown label scheme tag " + std::to_string(scheme));
  ds.header.scheme = static_cast<LabelScheme>(scheme);

  ds.samples.resize(ds.header.sample_count);
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    ModalSample &s = ds.samples[i];
    bool ok = r.Get(s.label);
    for (Modality m : kAllModalities) {
      const SeqShape &shape = ds.header.shapes[Index(m)];
      FeatureMatrix &x = s.features[Index(m)];
      x.rows = shape.steps;
      x.cols = shape.dim;
      x.values.resize(static_cast<std::size_t>(x.rows) * x.cols);
      ok = ok && r.GetFloats(x.values);
    }
    if (!ok)
      throw DataError(DataErrorKind::kTruncated,
                      "file truncated in sample " + std::to_string(i));
    CheckSample(ds.header, s, i);
  }
  if (!r.AtEnd())
    throw DataError(DataErrorKind::kCountMismatch,
                    "trailing bytes after " +
                        std::to_string(ds.header.sample_count) + " samples");
  return ds;
}

std::string HeaderToJson(const DatasetHeader &header) {
  nlohmann::ordered_json j;
  j["magic"] = "MCIH";
  j["version"] = DatasetHeader::kVersion;
  for (Modality m : kAllModalities) {
    const SeqShape &s = header.shapes[Index(m)];
    j[std::string("modality_") + ModalityLetter(m)] = {{"T", s.steps},
                                                       {"D", s.dim}};
  }
  j["samples"] = header.sample_count;
  j["label_scheme"] = LabelSchemeName(header.scheme);
  return j.dump(2);
}

DatasetHeader HeaderFor(const SyntheticSpec &spec) {
  DatasetHeader h;
  h.shapes = spec.shapes;
  h.sample_count = static_cast<std::uint32_t>(spec.count);
  h.scheme = spec.scheme;
  return h;
}

std::vector<ModalSample> GenerateSynthetic(const SyntheticSpec &spec) {
  if (spec.rho < 0.0 || spec.rho > 1.0)
    throw std::invalid_argument("synthetic: rho must lie in [0, 1]");
  std::mt19937_64 pattern_rng(spec.pattern_seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Rank-1 pattern per modality, scaled to unit RMS entry.
  std::array<std::vector<double>, 3> patterns;
  for (Modality m : kAllModalities) {
    const SeqShape &s = spec.shapes[Index(m)];
    std::vector<double> a(s.steps), b(s.dim);
    for (double &v : a) v = normal(pattern_rng);
    for (double &v : b) v = normal(pattern_rng);
    std::vector<double> &p = patterns[Index(m)];
    p.resize(static_cast<std::size_t>(s.steps) * s.dim);
    double ss = 0.0;
    for (std::size_t i = 0; i < s.steps; ++i)
      for (std::size_t j = 0; j < s.dim; ++j) {
        p[i * s.dim + j] = a[i] * b[j];
        ss += p[i * s.dim + j] * p[i * s.dim + j];
      }
    const double rms = std::sqrt(ss / static_cast<double>(p.size()));
    for (double &v : p) v /= rms;
  }

  static constexpr double kMosiLevels[] = {-1.0,      -2.0 / 3.0, -1.0 / 3.0,
                                           0.0,       1.0 / 3.0,  2.0 / 3.0,
                                           1.0};
  static constexpr double kSimsLevels[] = {-1.0, -0.5, 0.0, 0.5, 1.0};

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<ModalSample> out(spec.count);
  for (ModalSample &sample : out) {
    double y = 0.0;
    switch (spec.labels) {
      case LabelDistribution::kUniform: y = uniform(rng); break;
      case LabelDistribution::kMosi7Levels:
        y = kMosiLevels[std::uniform_int_distribution<int>(0, 6)(rng)];
        break;
      case LabelDistribution::kSims5Levels:
        y = kSimsLevels[std::uniform_int_distribution<int>(0, 4)(rng)];
        break;
    }
    sample.label = static_cast<float>(y);
    const double y_stored = sample.label;
    for (Modality m : kAllModalities) {
      const SeqShape &s = spec.shapes[Index(m)];
      FeatureMatrix &x = sample.features[Index(m)];
      x.rows = s.steps;
      x.cols = s.dim;
      x.values.resize(static_cast<std::size_t>(s.steps) * s.dim);
      const std::vector<double> &p = patterns[Index(m)];
      for (std::size_t i = 0; i < x.values.size(); ++i)
        x.values[i] = static_cast<float>(spec.rho * y_stored * p[i] +
                                         (1.0 - spec.rho) * normal(rng));
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> MakeBatches(std::size_t n,
                                                  std::size_t batch_size,
                                                  std::uint64_t seed,
                                                  bool shuffle) {
  if (n == 0) throw DataError(DataErrorKind::kEmpty, "cannot batch an empty dataset");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle) {
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < n; i += batch_size)
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(
                                             std::min(n, i + batch_size)));
  return batches;
}

}  // namespace mcihn
