// include/mcihn/metrics.hpp

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

#ifndef MCIHN_METRICS_HPP_
#define MCIHN_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcihn {

/// Partition of [-1, 1] into classes. Bin i covers [edges[i-1], edges[i]);
/// the top bin is closed at +1, so boundary scores go to the higher bin.
struct DiscretizationScheme {
  std::string name;
  std::vector<double> edges;  // interior edges, strictly increasing
  std::vector<int> classes;   // edges.size() + 1 labels, ascending valence
};

/// mosi2, mosi7, sims2, sims3, sims5. Throws std::invalid_argument on an
/// unknown name.
const DiscretizationScheme &GetScheme(const std::string &name);

struct Discretized {
  int label = 0;
  bool clamped = false;  // score was outside [-1, 1]
};
Discretized Discretize(double score, const DiscretizationScheme &scheme);
std::vector<int> DiscretizeAll(std::span<const double> scores,
                               const DiscretizationScheme &scheme);

double Accuracy(std::span<const int> predicted, std::span<const int> truth);
/// Per-class F1 weighted by true-class support; undefined F1 counts as 0.
double F1Weighted(std::span<const int> predicted, std::span<const int> truth);

struct Correlation {
  double r = 0.0;
  bool defined = false;  // false when either side has zero variance
};
Correlation PearsonCorr(std::span<const double> scores,
                        std::span<const double> labels);

double MeanAbsoluteError(std::span<const double> scores,
                         std::span<const double> labels);

enum class SchemeFamily { kMosi, kSims };
std::string SchemeFamilyName(SchemeFamily family);
SchemeFamily ParseSchemeFamily(const std::string &name);

struct EvaluateOptions {
  SchemeFamily family = SchemeFamily::kMosi;
  /// Drop samples whose true label is exactly 0 from Acc-2 and F1.
  bool acc2_drop_neutral = false;
};

struct MetricsReport {
  std::optional<double> acc2, acc3, acc5, acc7;
  double f1 = 0.0;
  double mae = 0.0;
  double corr = 0.0;
  bool corr_defined = false;
  std::size_t n = 0;
  std::size_t clamped = 0;
  std::string scheme;    // family name
  std::string acc2_rule;

  bool operator==(const MetricsReport &) const = default;
};

/// Fills Acc-2/7 + F1 for mosi, Acc-2/3/5 + F1 for sims, plus MAE and Corr.
MetricsReport Evaluate(std::span<const double> predictions,
                       std::span<const double> labels,
                       const EvaluateOptions &options);

/// JSON object with keys acc2, acc3, acc5, acc7, f1, mae, corr, n, scheme
/// (inapplicable accuracies are null) plus corr_defined, acc2_rule, clamped.
std::string ReportToJson(const MetricsReport &report);
MetricsReport ReportFromJson(const std::string &json);

}  // namespace mcihn

#endif  // MCIHN_METRICS_HPP_
