// tests/test_dataio.cpp

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

#include <Eigen/Dense>
#include <algorithm>
#include <fstream>
#include <random>

#include "doctest.h"
#include "mcihn/dataio.hpp"
#include "test_util.hpp"

using namespace mcihn;

namespace {

Dataset Synth(std::size_t n, double rho, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.count = n;
  spec.rho = rho;
  spec.seed = seed;
  spec.pattern_seed = seed + 100;
  return {HeaderFor(spec), GenerateSynthetic(spec)};
}

std::vector<char> Bytes(const std::filesystem::path &p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

void WriteBytes(const std::filesystem::path &p, const std::vector<char> &b) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  os.write(b.data(), static_cast<std::streamsize>(b.size()));
}

// R^2 of an ordinary least-squares fit of y on [1, time-pooled features].
double PooledR2(const std::vector<ModalSample> &s, Modality m) {
  const auto &x0 = s[0].x(m);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(s.size()), x0.cols + 1);
  Eigen::VectorXd y(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto &x = s[i].x(m);
    const auto r = static_cast<Eigen::Index>(i);
    a(r, 0) = 1.0;
    for (std::uint32_t j = 0; j < x.cols; ++j) {
      double sum = 0.0;
      for (std::uint32_t t = 0; t < x.rows; ++t) sum += x.values[t * x.cols + j];
      a(r, j + 1) = sum / x.rows;
    }
    y(r) = s[i].label;
  }
  const Eigen::VectorXd beta = a.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd resid = y - a * beta;
  const double ss_res = resid.squaredNorm();
  const double ss_tot = (y.array() - y.mean()).square().sum();
  return 1.0 - ss_res / ss_tot;
}

}  // namespace

TEST_CASE("feature file round trip of one sample is byte-identical") {
  auto dir = testutil::ScratchDir("dataio1");
  Dataset d = Synth(1, 0.5, 1);
  WriteFeatureFile(dir / "a.mcih", d.header, d.samples);
  Dataset back = ReadFeatureFile(dir / "a.mcih");
  CHECK(back.header == d.header);
  REQUIRE(back.samples.size() == 1);
  for (Modality m : kAllModalities) {
    const auto &x = d.samples[0].x(m).values, &y = back.samples[0].x(m).values;
    CHECK(std::memcmp(x.data(), y.data(), x.size() * sizeof(float)) == 0);
  }
  WriteFeatureFile(dir / "b.mcih", back.header, back.samples);
  CHECK(Bytes(dir / "a.mcih") == Bytes(dir / "b.mcih"));
}

TEST_CASE("header count differing from the sample list is an error") {
  auto dir = testutil::ScratchDir("dataio2");
  Dataset d = Synth(3, 0.5, 2);
  d.header.sample_count = 4;
  try {
    WriteFeatureFile(dir / "x.mcih", d.header, d.samples);
    FAIL("expected DataError");
  } catch (const DataError &e) {
    CHECK(e.kind() == DataErrorKind::kCountMismatch);
  }
}

TEST_CASE("100 random samples round-trip with exact labels") {
  auto dir = testutil::ScratchDir("dataio3");
  SyntheticSpec spec;
  spec.count = 100;
  spec.labels = LabelDistribution::kUniform;
  spec.seed = 33;
  auto samples = GenerateSynthetic(spec);
  WriteFeatureFile(dir / "c.mcih", HeaderFor(spec), samples);
  Dataset back = ReadFeatureFile(dir / "c.mcih");
  REQUIRE(back.samples.size() == 100);
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(std::memcmp(&back.samples[i].label, &samples[i].label, sizeof(float)) == 0);
    CHECK(back.samples[i] == samples[i]);
  }
}

TEST_CASE("nonconforming sample is rejected with index and shapes") {
  auto dir = testutil::ScratchDir("dataio4");
  Dataset d = Synth(3, 0.5, 4);
  d.samples[2].features[1].rows = 5;
  try {
    WriteFeatureFile(dir / "x.mcih", d.header, d.samples);
    FAIL("expected DataError");
  } catch (const DataError &e) {
    CHECK(e.kind() == DataErrorKind::kShapeMismatch);
    const std::string msg = e.what();
    CHECK(msg.find("sample 2") != std::string::npos);
    CHECK(msg.find("6x16") != std::string::npos);
  }
}

TEST_CASE("reader error kinds are distinct") {
  auto dir = testutil::ScratchDir("dataio5");
  auto kind_of = [](const std::filesystem::path &p) {
    try {
      ReadFeatureFile(p);
    } catch (const DataError &e) {
      return e.kind();
    }
    FAIL("expected DataError");
    return DataErrorKind::kIo;
  };

  WriteBytes(dir / "empty.mcih", {});
  CHECK(kind_of(dir / "empty.mcih") == DataErrorKind::kBadMagic);
  WriteBytes(dir / "junk.mcih", {'N', 'O', 'P', 'E', 1, 0});
  CHECK(kind_of(dir / "junk.mcih") == DataErrorKind::kBadMagic);

  Dataset d = Synth(4, 0.5, 5);
  WriteFeatureFile(dir / "ok.mcih", d.header, d.samples);
  auto bytes = Bytes(dir / "ok.mcih");
  const std::size_t header = 4 + 2 + 7 * 4 + 4;
  const std::size_t per_sample = 4 + 4 * (4 * 12 + 6 * 16 + 8 * 12);
  REQUIRE(bytes.size() == header + 4 * per_sample);

  auto cut = bytes;
  cut.resize(header + 2 * per_sample + per_sample / 2);
  WriteBytes(dir / "cut.mcih", cut);
  try {
    ReadFeatureFile(dir / "cut.mcih");
    FAIL("expected truncation");
  } catch (const DataError &e) {
    CHECK(e.kind() == DataErrorKind::kTruncated);
    CHECK(std::string(e.what()).find("sample 2") != std::string::npos);
  }

  auto version = bytes;
  version[4] = 9;
  WriteBytes(dir / "ver.mcih", version);
  CHECK(kind_of(dir / "ver.mcih") == DataErrorKind::kBadVersion);

  auto label = bytes;
  const float big = 1.5f;
  std::memcpy(&label[header + per_sample], &big, 4);
  WriteBytes(dir / "label.mcih", label);
  CHECK(kind_of(dir / "label.mcih") == DataErrorKind::kLabelOutOfRange);

  auto trailing = bytes;
  trailing.push_back(0);
  WriteBytes(dir / "trail.mcih", trailing);
  CHECK(kind_of(dir / "trail.mcih") == DataErrorKind::kCountMismatch);

  CHECK(kind_of(dir / "missing.mcih") == DataErrorKind::kIo);
}

TEST_CASE("synthetic generation is a pure function of the spec") {
  Dataset a = Synth(20, 0.4, 7), b = Synth(20, 0.4, 7), c = Synth(20, 0.4, 8);
  CHECK(a.samples == b.samples);
  CHECK_FALSE(a.samples == c.samples);
  for (const auto &s : a.samples) CHECK(std::fabs(s.label) <= 1.0f);
}

TEST_CASE("rho = 0 leaves no linear signal, rho = 1 is fully recoverable") {
  Dataset noise = Synth(512, 0.0, 9);
  for (Modality m : kAllModalities) CHECK(PooledR2(noise.samples, m) < 0.1);
  Dataset clean = Synth(64, 1.0, 10);
  CHECK(PooledR2(clean.samples, Modality::kText) > 0.99);
}

TEST_CASE("label distributions use their level sets") {
  SyntheticSpec spec;
  spec.count = 200;
  spec.labels = LabelDistribution::kSims5Levels;
  for (const auto &s : GenerateSynthetic(spec)) {
    const float l = s.label;
    CHECK((l == -1.0f || l == -0.5f || l == 0.0f || l == 0.5f || l == 1.0f));
  }
  spec.labels = LabelDistribution::kMosi7Levels;
  for (const auto &s : GenerateSynthetic(spec)) {
    const double k = s.label * 3.0;
    CHECK(std::fabs(k - std::round(k)) < 1e-6);
  }
}

TEST_CASE("make_batches examples") {
  auto b = MakeBatches(10, 4, 0, true);
  REQUIRE(b.size() == 3);
  CHECK(b[0].size() == 4);
  CHECK(b[1].size() == 4);
  CHECK(b[2].size() == 2);

  auto ordered = MakeBatches(7, 3, 123, false);
  std::vector<std::size_t> flat;
  for (auto &x : ordered) flat.insert(flat.end(), x.begin(), x.end());
  CHECK(flat == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6});

  CHECK(MakeBatches(30, 4, 5, true) == MakeBatches(30, 4, 5, true));
  CHECK_FALSE(MakeBatches(30, 4, 5, true) == MakeBatches(30, 4, 6, true));

  try {
    MakeBatches(0, 4, 0, true);
    FAIL("expected DataError");
  } catch (const DataError &e) {
    CHECK(e.kind() == DataErrorKind::kEmpty);
  }
}

TEST_CASE("make_batches partitions every n <= 64 exhaustively") {
  for (std::size_t n = 1; n <= 64; ++n)
    for (std::size_t bs = 1; bs <= n + 1; ++bs)
      for (bool shuffle : {false, true}) {
        auto batches = MakeBatches(n, bs, n * 131 + bs, shuffle);
        std::vector<std::size_t> seen;
        for (std::size_t i = 0; i < batches.size(); ++i) {
          CHECK(!batches[i].empty());
          if (i + 1 < batches.size()) CHECK(batches[i].size() == bs);
          seen.insert(seen.end(), batches[i].begin(), batches[i].end());
        }
        std::sort(seen.begin(), seen.end());
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        CHECK(seen == all);
      }
}

TEST_CASE("header json and shape presets") {
  Dataset d = Synth(3, 0.5, 1);
  const std::string js = HeaderToJson(d.header);
  CHECK(js.find("\"samples\": 3") != std::string::npos);
  CHECK(js.find("mosi7") != std::string::npos);
  auto full = FullScaleShapes();
  CHECK(full[Index(Modality::kVisual)] == SeqShape{10, 512});
  CHECK(full[Index(Modality::kText)] == SeqShape{36, 768});
  CHECK(full[Index(Modality::kAudio)] == SeqShape{128, 512});
  auto desk = DeskScaleShapes();
  CHECK(desk[Index(Modality::kVisual)] == SeqShape{4, 12});
  CHECK(desk[Index(Modality::kText)] == SeqShape{6, 16});
  CHECK(desk[Index(Modality::kAudio)] == SeqShape{8, 12});
  CHECK(ParseLabelScheme("sims5") == LabelScheme::kSims5);
  CHECK_THROWS(ParseLabelScheme("imdb"));
}
