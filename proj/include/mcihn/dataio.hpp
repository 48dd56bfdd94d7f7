// include/mcihn/dataio.hpp

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

// Feature files, synthetic datasets and batching.
//
// A feature file ("MCIH" format) is little-endian binary:
//
//   bytes 0..3   magic "MCIH"
//   u16          format version (1)
//   u32 x 6      T_v, D_v, T_t, D_t, T_a, D_a
//   u32          sample count
//   u32          label scheme (0 = mosi7, 1 = sims5)
//   then per sample:
//     f32        label in [-1, 1]
//     f32 ...    x_v (T_v*D_v), x_t (T_t*D_t), x_a (T_a*D_a), row-major

#ifndef MCIHN_DATAIO_HPP_
#define MCIHN_DATAIO_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcihn {

enum class Modality : std::uint8_t { kVisual = 0, kText = 1, kAudio = 2 };
inline constexpr std::array<Modality, 3> kAllModalities = {
    Modality::kVisual, Modality::kText, Modality::kAudio};
inline constexpr std::size_t Index(Modality m) {
  return static_cast<std::size_t>(m);
}
char ModalityLetter(Modality m);

struct SeqShape {
  std::uint32_t steps = 0;  // T
  std::uint32_t dim = 0;    // D
  bool operator==(const SeqShape &) const = default;
};

enum class LabelScheme : std::uint32_t { kMosi7 = 0, kSims5 = 1 };
std::string LabelSchemeName(LabelScheme scheme);
LabelScheme ParseLabelScheme(const std::string &name);

/// Row-major single-precision feature matrix.
struct FeatureMatrix {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<float> values;
  bool operator==(const FeatureMatrix &) const = default;
};

struct ModalSample {
  std::array<FeatureMatrix, 3> features;  // indexed by Modality
  float label = 0.0f;
  const FeatureMatrix &x(Modality m) const { return features[Index(m)]; }
  bool operator==(const ModalSample &) const = default;
};

struct DatasetHeader {
  static constexpr char kMagic[4] = {'M', 'C', 'I', 'H'};
  static constexpr std::uint16_t kVersion = 1;

  std::array<SeqShape, 3> shapes{};
  std::uint32_t sample_count = 0;
  LabelScheme scheme = LabelScheme::kMosi7;
  bool operator==(const DatasetHeader &) const = default;
};

/// (10,512) / (36,768) / (128,512).
std::array<SeqShape, 3> FullScaleShapes();
/// (4,12) / (6,16) / (8,12).
std::array<SeqShape, 3> DeskScaleShapes();

enum class DataErrorKind {
  kIo,
  kBadMagic,
  kBadVersion,
  kBadHeader,
  kTruncated,
  kLabelOutOfRange,
  kShapeMismatch,
  kCountMismatch,
  kEmpty,
};
const char *DataErrorKindName(DataErrorKind kind);

class DataError : public std::runtime_error {
 public:
  DataError(DataErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}
  DataErrorKind kind() const { return kind_; }

 private:
  DataErrorKind kind_;
};

struct Dataset {
  DatasetHeader header;
  std::vector<ModalSample> samples;
};

/// Throws DataError(kShapeMismatch) naming the sample index and both shapes.
void CheckSample(const DatasetHeader &header, const ModalSample &sample,
                 std::size_t index);
void WriteFeatureFile(const std::filesystem::path &path,
                      const DatasetHeader &header,
                      const std::vector<ModalSample> &samples);
Dataset ReadFeatureFile(const std::filesystem::path &path);
/// Header as a small JSON document.
std::string HeaderToJson(const DatasetHeader &header);

enum class LabelDistribution { kUniform, kMosi7Levels, kSims5Levels };

struct SyntheticSpec {
  std::size_t count = 64;
  std::array<SeqShape, 3> shapes = DeskScaleShapes();
  double rho = 0.5;  // signal-to-noise mix in [0, 1]
  LabelDistribution labels = LabelDistribution::kUniform;
  LabelScheme scheme = LabelScheme::kMosi7;
  std::uint64_t seed = 0;          // labels and noise
  std::uint64_t pattern_seed = 0;  // planted directions; share across splits
};

/// Each modality carries x = rho * y * P_m + (1 - rho) * noise, where P_m is
/// a fixed rank-1 pattern (unit RMS) drawn from pattern_seed and noise is
/// i.i.d. standard normal drawn from seed.
std::vector<ModalSample> GenerateSynthetic(const SyntheticSpec &spec);
DatasetHeader HeaderFor(const SyntheticSpec &spec);

/// Index batches covering [0, n) exactly once; the last may be short.
std::vector<std::vector<std::size_t>> MakeBatches(std::size_t n,
                                                  std::size_t batch_size,
                                                  std::uint64_t seed,
                                                  bool shuffle);

}  // namespace mcihn

#endif  // MCIHN_DATAIO_HPP_
