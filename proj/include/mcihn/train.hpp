// include/mcihn/train.hpp

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

#ifndef MCIHN_TRAIN_HPP_
#define MCIHN_TRAIN_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcihn/config.hpp"
#include "mcihn/dataio.hpp"
#include "mcihn/metrics.hpp"
#include "mcihn/model.hpp"

namespace mcihn {

/// Raised when a training stage produces a non-finite loss or value.
class TrainError : public std::runtime_error {
 public:
  TrainError(const std::string &stage, const std::string &what)
      : std::runtime_error("stage " + stage + ": " + what), stage_(stage) {}
  const std::string &stage() const { return stage_; }

 private:
  std::string stage_;
};

struct Checkpoint {
  static constexpr char kMagic[4] = {'M', 'C', 'K', 'P'};
  static constexpr std::uint16_t kVersion = 1;

  TrainConfig config;
  ModelParams params;
  std::uint32_t epoch = 0;
  double best_val_mae = 0.0;
  std::uint64_t seed = 0;
};

/// Little-endian binary: magic, version, config text, epoch, best MAE, seed,
/// then every named tensor (name, rank, extents, f64 values).
void SaveCheckpoint(const std::filesystem::path &path, const Checkpoint &ckpt);
Checkpoint LoadCheckpoint(const std::filesystem::path &path);

struct StepRecord {
  std::size_t epoch = 0;
  std::size_t step = 0;
  double l_adp = 0.0;
  double l_mul = 0.0;
  double l_combined = 0.0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  std::optional<std::array<double, 3>> l_ae;  // per modality, AAE variants only
  std::optional<double> l_disc;               // summed over active modalities
  std::optional<double> l_gen;
  double l_adp = 0.0;     // epoch means
  double l_mul = 0.0;
  double l_combined = 0.0;  // l_adp + l_mul
  MetricsReport val;
};

struct History {
  std::vector<EpochRecord> epochs;
  std::vector<StepRecord> steps;
  std::size_t best_epoch = 0;
};

/// One JSON object per epoch record, newline separated.
std::string HistoryToJsonLines(const History &history);
std::string StepsToJsonLines(const History &history);

struct TrainResult {
  Checkpoint checkpoint;
  History history;
};

/// Trains per the configured ablation with early stopping on validation MAE
/// and returns the best epoch's parameters. Seed-deterministic.
TrainResult Train(const TrainConfig &config, const Dataset &train,
                  const Dataset &valid);

/// Forward-only pass (dropout off) scored by the metrics module.
MetricsReport EvaluateCheckpoint(const Checkpoint &ckpt, const Dataset &data);
MetricsReport EvaluateParams(const ModelParams &params,
                             const TrainConfig &config, const Dataset &data);

struct AblationRow {
  Ablation ablation;
  std::vector<MetricsReport> per_seed;
  MetricsReport mean;  // averaged over seeds
};

/// Trains and scores full, -VT, -VA, -TA, mcihn-1 and mcihn-2 for every seed
/// (seed controls both initialization and shuffling).
std::vector<AblationRow> RunAblationSuite(const TrainConfig &config,
                                          const Dataset &train,
                                          const Dataset &valid,
                                          const std::vector<std::uint64_t> &seeds);
/// Text table with one row per variant and the family's metric columns.
std::string FormatAblationTable(const std::vector<AblationRow> &rows,
                                SchemeFamily family);

struct SweepPoint {
  double value = 0.0;
  MetricsReport val;
};
/// Grid over dropout or adaptation_weight using the values
/// 0.001, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99.
std::vector<SweepPoint> RunSweep(const TrainConfig &config, const Dataset &train,
                                 const Dataset &valid, const std::string &key);
const std::vector<double> &SweepGrid();

/// Central-difference check of the combined loss through the fusion module,
/// gate mechanism and encoders on the first `batch` samples of a synthetic
/// set built for `config`'s shapes.
double GradCheckModel(const TrainConfig &config, std::size_t batch,
                      std::uint64_t seed, double eps = 1e-5);

}  // namespace mcihn

#endif  // MCIHN_TRAIN_HPP_
