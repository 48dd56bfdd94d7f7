// src/metrics.cpp

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

#include "mcihn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace mcihn {

namespace {

std::vector<DiscretizationScheme> BuildSchemes() {
  std::vector<double> mosi7_edges;
  for (int k = 1; k <= 6; ++k) mosi7_edges.push_back(-1.0 + 2.0 * k / 7.0);
  return {
      {"mosi2", {0.0}, {-1, 1}},
      {"mosi7", mosi7_edges, {-3, -2, -1, 0, 1, 2, 3}},
      {"sims2", {0.0}, {-1, 1}},
      // CH-SIMS levels -1, -0.5, 0, 0.5, 1 with midpoint edges.
      {"sims3", {-0.25, 0.25}, {-1, 0, 1}},
      {"sims5", {-0.75, -0.25, 0.25, 0.75}, {-2, -1, 0, 1, 2}},
  };
}

void RequireAligned(std::size_t a, std::size_t b, const char *op) {
  if (a != b)
    throw std::invalid_argument(std::string(op) + ": length mismatch " +
                                std::to_string(a) + " vs " + std::to_string(b));
  if (a == 0) throw std::invalid_argument(std::string(op) + ": empty input");
}

}  // namespace

const DiscretizationScheme &GetScheme(const std::string &name) {
  static const std::vector<DiscretizationScheme> schemes = BuildSchemes();
  for (const DiscretizationScheme &s : schemes)
    if (s.name == name) return s;
  throw std::invalid_argument("unknown discretization scheme '" + name + "'");
}

Discretized Discretize(double score, const DiscretizationScheme &scheme) {
  Discretized out;
  if (score < -1.0 || score > 1.0) {
    out.clamped = true;
    score = std::clamp(score, -1.0, 1.0);
  }
  const auto bin = std::upper_bound(scheme.edges.begin(), scheme.edges.end(),
                                    score) -
                   scheme.edges.begin();
  out.label = scheme.classes[static_cast<std::size_t>(bin)];
  return out;
}

std::vector<int> DiscretizeAll(std::span<const double> scores,
                               const DiscretizationScheme &scheme) {
  std::vector<int> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(Discretize(s, scheme).label);
  return out;
}

double Accuracy(std::span<const int> predicted, std::span<const int> truth) {
  RequireAligned(predicted.size(), truth.size(), "accuracy");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double F1Weighted(std::span<const int> predicted, std::span<const int> truth) {
  RequireAligned(predicted.size(), truth.size(), "f1_weighted");
  struct Counts {
    std::size_t tp = 0, fp = 0, fn = 0, support = 0;
  };
  std::map<int, Counts> counts;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    counts[truth[i]].support++;
    if (predicted[i] == truth[i]) {
      counts[truth[i]].tp++;
    } else {
      counts[predicted[i]].fp++;
      counts[truth[i]].fn++;
    }
  }
  double total = 0.0;
  for (const auto &[label, c] : counts) {
    if (c.support == 0) continue;
    const double denom = static_cast<double>(2 * c.tp + c.fp + c.fn);
    const double f1 = denom > 0.0 ? 2.0 * static_cast<double>(c.tp) / denom : 0.0;
    total += f1 * static_cast<double>(c.support);
  }
  return total / static_cast<double>(truth.size());
}

Correlation PearsonCorr(std::span<const double> scores,
                        std::span<const double> labels) {
  RequireAligned(scores.size(), labels.size(), "pearson_corr");
  const std::size_t n = scores.size();
  if (n < 2) return {};
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
  };
  if (constant(scores) || constant(labels)) return {};
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += scores[i];
    my += labels[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = scores[i] - mx, dy = labels[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return {};
  return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), true};
}

double MeanAbsoluteError(std::span<const double> scores,
                         std::span<const double> labels) {
  RequireAligned(scores.size(), labels.size(), "mae");
  double s = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    s += std::abs(scores[i] - labels[i]);
  return s / static_cast<double>(scores.size());
}

std::string SchemeFamilyName(SchemeFamily family) {
  return family == SchemeFamily::kSims ? "sims" : "mosi";
}

SchemeFamily ParseSchemeFamily(const std::string &name) {
  if (name == "mosi" || name == "mosi7") return SchemeFamily::kMosi;
  if (name == "sims" || name == "sims5") return SchemeFamily::kSims;
  throw std::invalid_argument("unknown scheme family '" + name + "'");
}

MetricsReport Evaluate(std::span<const double> predictions,
                       std::span<const double> labels,
                       const EvaluateOptions &options) {
  RequireAligned(predictions.size(), labels.size(), "evaluate");
  MetricsReport r;
  r.n = labels.size();
  r.scheme = SchemeFamilyName(options.family);
  r.acc2_rule = options.acc2_drop_neutral ? "neg<0|pos>0, neutral dropped"
                                          : "neg<0|nonneg>=0";
  for (double p : predictions) r.clamped += (p < -1.0 || p > 1.0);

  const bool mosi = options.family == SchemeFamily::kMosi;
  const DiscretizationScheme &binary = GetScheme(mosi ? "mosi2" : "sims2");
  std::vector<double> bp, bl;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (options.acc2_drop_neutral && labels[i] == 0.0) continue;
    bp.push_back(predictions[i]);
    bl.push_back(labels[i]);
  }
  if (!bp.empty()) {
    const std::vector<int> p2 = DiscretizeAll(bp, binary);
    const std::vector<int> t2 = DiscretizeAll(bl, binary);
    r.acc2 = Accuracy(p2, t2);
    r.f1 = F1Weighted(p2, t2);
  }
  auto acc = [&](const char *name) {
    const DiscretizationScheme &s = GetScheme(name);
    return Accuracy(DiscretizeAll(predictions, s), DiscretizeAll(labels, s));
  };
  if (mosi) {
    r.acc7 = acc("mosi7");
  } else {
    r.acc3 = acc("sims3");
    r.acc5 = acc("sims5");
  }
  r.mae = MeanAbsoluteError(predictions, labels);
  const Correlation c = PearsonCorr(predictions, labels);
  r.corr = c.r;
  r.corr_defined = c.defined;
  return r;
}

std::string ReportToJson(const MetricsReport &report) {
  nlohmann::ordered_json j;
  auto opt = [](const std::optional<double> &v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  j["acc2"] = opt(report.acc2);
  j["acc3"] = opt(report.acc3);
  j["acc5"] = opt(report.acc5);
  j["acc7"] = opt(report.acc7);
  j["f1"] = report.f1;
  j["mae"] = report.mae;
  j["corr"] = report.corr;
  j["n"] = report.n;
  j["scheme"] = report.scheme;
  j["corr_defined"] = report.corr_defined;
  j["acc2_rule"] = report.acc2_rule;
  j["clamped"] = report.clamped;
  return j.dump(2);
}

MetricsReport ReportFromJson(const std::string &json) {
  const nlohmann::json j = nlohmann::json::parse(json);
  MetricsReport r;
  auto opt = [&](const char *key) -> std::optional<double> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<double>();
  };
  r.acc2 = opt("acc2");
  r.acc3 = opt("acc3");
  r.acc5 = opt("acc5");
  r.acc7 = opt("acc7");
  r.f1 = j.at("f1").get<double>();
  r.mae = j.at("mae").get<double>();
  r.corr = j.at("corr").get<double>();
  r.n = j.at("n").get<std::size_t>();
  r.scheme = j.at("scheme").get<std::string>();
  r.corr_defined = j.value("corr_defined", false);
  r.acc2_rule = j.value("acc2_rule", std::string());
  r.clamped = j.value("clamped", std::size_t{0});
  return r;
}

}  // namespace mcihn
