// src/c_api.cpp

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

#include "mcihn/mcihn.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "mcihn/train.hpp"

struct mcihn_config {
  mcihn::TrainConfig value;
};
struct mcihn_dataset {
  mcihn::Dataset value;
};
struct mcihn_model {
  mcihn::Checkpoint value;
};

namespace {

using json = nlohmann::ordered_json;

thread_local std::string g_last_error;

mcihn_status Fail(mcihn_status status, const std::string &message) {
  g_last_error = message;
  return status;
}

// Maps the library's exception types onto status codes.
template <typename F>
mcihn_status Wrap(F &&body) {
  try {
    g_last_error.clear();
    body();
    return MCIHN_OK;
  } catch (const mcihn::ShapeError &e) {
    return Fail(MCIHN_ERR_SHAPE, e.what());
  } catch (const mcihn::NumericError &e) {
    return Fail(MCIHN_ERR_NUMERIC, e.what());
  } catch (const mcihn::TrainError &e) {
    return Fail(MCIHN_ERR_TRAIN, e.what());
  } catch (const mcihn::DataError &e) {
    return Fail(e.kind() == mcihn::DataErrorKind::kIo ? MCIHN_ERR_IO
                                                      : MCIHN_ERR_DATA,
                std::string(mcihn::DataErrorKindName(e.kind())) + ": " +
                    e.what());
  } catch (const std::invalid_argument &e) {
    return Fail(MCIHN_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::filesystem::filesystem_error &e) {
    return Fail(MCIHN_ERR_IO, e.what());
  } catch (const std::runtime_error &e) {
    return Fail(MCIHN_ERR_IO, e.what());
  } catch (const std::exception &e) {
    return Fail(MCIHN_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(MCIHN_ERR_INTERNAL, "unknown exception");
  }
}

void Require(const void *p, const char *name) {
  if (p == nullptr) throw std::invalid_argument(std::string(name) + " is NULL");
}

char *Dup(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void WriteText(const std::filesystem::path &path, const std::string &text) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

mcihn::LabelDistribution ParseDistribution(const char *name) {
  const std::string s = name ? name : "uniform";
  if (s == "uniform") return mcihn::LabelDistribution::kUniform;
  if (s == "mosi7") return mcihn::LabelDistribution::kMosi7Levels;
  if (s == "sims5") return mcihn::LabelDistribution::kSims5Levels;
  throw std::invalid_argument("labels must be uniform, mosi7 or sims5, got " + s);
}

json ReportJson(const mcihn::MetricsReport &r) {
  return json::parse(mcihn::ReportToJson(r));
}

}  // namespace

extern "C" {

const char *mcihn_last_error(void) { return g_last_error.c_str(); }

const char *mcihn_status_name(mcihn_status status) {
  switch (status) {
    case MCIHN_OK: return "ok";
    case MCIHN_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case MCIHN_ERR_IO: return "io";
    case MCIHN_ERR_DATA: return "data";
    case MCIHN_ERR_SHAPE: return "shape";
    case MCIHN_ERR_NUMERIC: return "numeric";
    case MCIHN_ERR_TRAIN: return "train";
    case MCIHN_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char *mcihn_version(void) { return "1.0.0"; }

void mcihn_string_free(char *s) { std::free(s); }

mcihn_status mcihn_config_new(mcihn_config **out) {
  return Wrap([&] {
    Require(out, "out");
    *out = new mcihn_config{};
  });
}

mcihn_status mcihn_config_load(const char *path, mcihn_config **out) {
  return Wrap([&] {
    Require(path, "path");
    Require(out, "out");
    *out = new mcihn_config{mcihn::LoadConfigFile(path)};
  });
}

mcihn_status mcihn_config_set(mcihn_config *config, const char *key,
                              const char *value) {
  return Wrap([&] {
    Require(config, "config");
    Require(key, "key");
    Require(value, "value");
    mcihn::TrainConfig next = config->value;
    next.Set(key, value);
    next.Validate();
    config->value = next;
  });
}

mcihn_status mcihn_config_to_text(const mcihn_config *config, char **out) {
  return Wrap([&] {
    Require(config, "config");
    Require(out, "out");
    *out = Dup(config->value.ToText());
  });
}

void mcihn_config_free(mcihn_config *config) { delete config; }

mcihn_status mcihn_dataset_synthesize(const mcihn_config *config,
                                      const mcihn_synth_options *opts,
                                      mcihn_dataset **out) {
  return Wrap([&] {
    Require(opts, "opts");
    Require(out, "out");
    mcihn::SyntheticSpec spec;
    spec.count = opts->count;
    if (config) spec.shapes = config->value.shapes;
    spec.rho = opts->rho;
    spec.labels = ParseDistribution(opts->labels);
    spec.scheme = mcihn::ParseLabelScheme(opts->scheme ? opts->scheme : "mosi7");
    spec.seed = opts->seed;
    spec.pattern_seed = opts->pattern_seed;
    auto samples = mcihn::GenerateSynthetic(spec);
    *out = new mcihn_dataset{{mcihn::HeaderFor(spec), std::move(samples)}};
  });
}

mcihn_status mcihn_dataset_read(const char *path, mcihn_dataset **out) {
  return Wrap([&] {
    Require(path, "path");
    Require(out, "out");
    *out = new mcihn_dataset{mcihn::ReadFeatureFile(path)};
  });
}

mcihn_status mcihn_dataset_write(const mcihn_dataset *dataset, const char *path) {
  return Wrap([&] {
    Require(dataset, "dataset");
    Require(path, "path");
    mcihn::WriteFeatureFile(path, dataset->value.header, dataset->value.samples);
  });
}

mcihn_status mcihn_dataset_info_json(const mcihn_dataset *dataset, char **out) {
  return Wrap([&] {
    Require(dataset, "dataset");
    Require(out, "out");
    *out = Dup(mcihn::HeaderToJson(dataset->value.header));
  });
}

size_t mcihn_dataset_size(const mcihn_dataset *dataset) {
  return dataset ? dataset->value.samples.size() : 0;
}

void mcihn_dataset_free(mcihn_dataset *dataset) { delete dataset; }

mcihn_status mcihn_train(const mcihn_config *config, const mcihn_dataset *train,
                         const mcihn_dataset *valid, const char *run_dir,
                         mcihn_model **out_model) {
  return Wrap([&] {
    Require(config, "config");
    Require(train, "train");
    Require(valid, "valid");
    mcihn::TrainResult result =
        mcihn::Train(config->value, train->value, valid->value);
    if (run_dir != nullptr) {
      const std::filesystem::path dir(run_dir);
      std::filesystem::create_directories(dir);
      mcihn::SaveCheckpoint(dir / "checkpoint.bin", result.checkpoint);
      WriteText(dir / "history.jsonl", mcihn::HistoryToJsonLines(result.history));
      WriteText(dir / "steps.jsonl", mcihn::StepsToJsonLines(result.history));
      WriteText(dir / "config.txt", config->value.ToText());
      json metrics;
      metrics["best_epoch"] = result.history.best_epoch;
      metrics["epochs_run"] = result.history.epochs.size();
      metrics["best_val_mae"] = result.checkpoint.best_val_mae;
      metrics["val"] = ReportJson(
          mcihn::EvaluateCheckpoint(result.checkpoint, valid->value));
      WriteText(dir / "metrics.json", metrics.dump(2) + "\n");
    }
    if (out_model != nullptr)
      *out_model = new mcihn_model{std::move(result.checkpoint)};
  });
}

mcihn_status mcihn_model_load(const char *path, mcihn_model **out) {
  return Wrap([&] {
    Require(path, "path");
    Require(out, "out");
    *out = new mcihn_model{mcihn::LoadCheckpoint(path)};
  });
}

mcihn_status mcihn_model_save(const mcihn_model *model, const char *path) {
  return Wrap([&] {
    Require(model, "model");
    Require(path, "path");
    mcihn::SaveCheckpoint(path, model->value);
  });
}

mcihn_status mcihn_model_config_text(const mcihn_model *model, char **out) {
  return Wrap([&] {
    Require(model, "model");
    Require(out, "out");
    *out = Dup(model->value.config.ToText());
  });
}

void mcihn_model_free(mcihn_model *model) { delete model; }

mcihn_status mcihn_evaluate(const mcihn_model *model,
                            const mcihn_dataset *dataset, char **out) {
  return Wrap([&] {
    Require(model, "model");
    Require(dataset, "dataset");
    Require(out, "out");
    *out = Dup(mcihn::ReportToJson(
        mcihn::EvaluateCheckpoint(model->value, dataset->value)));
  });
}

mcihn_status mcihn_predict(const mcihn_model *model, const mcihn_dataset *dataset,
                           double *scores, size_t capacity) {
  return Wrap([&] {
    Require(model, "model");
    Require(dataset, "dataset");
    Require(scores, "scores");
    const auto &samples = dataset->value.samples;
    if (capacity < samples.size())
      throw std::invalid_argument("scores holds " + std::to_string(capacity) +
                                  " slots, dataset has " +
                                  std::to_string(samples.size()));
    const auto out = mcihn::Predict(model->value.params, model->value.config,
                                    mcihn::ToTensors(samples));
    std::copy(out.begin(), out.end(), scores);
  });
}

mcihn_status mcihn_ablate(const mcihn_config *config, const mcihn_dataset *train,
                          const mcihn_dataset *valid, const uint64_t *seeds,
                          size_t num_seeds, char **table_out, char **json_out) {
  return Wrap([&] {
    Require(config, "config");
    Require(train, "train");
    Require(valid, "valid");
    Require(seeds, "seeds");
    const std::vector<std::uint64_t> seed_list(seeds, seeds + num_seeds);
    const auto rows = mcihn::RunAblationSuite(config->value, train->value,
                                              valid->value, seed_list);
    if (table_out != nullptr)
      *table_out = Dup(mcihn::FormatAblationTable(rows, config->value.scheme));
    if (json_out != nullptr) {
      json j = json::array();
      for (const auto &row : rows) {
        json r;
        r["variant"] = mcihn::AblationTag(row.ablation);
        r["seeds"] = seed_list;
        json per = json::array();
        for (const auto &m : row.per_seed) per.push_back(ReportJson(m));
        r["per_seed"] = per;
        r["mean"] = ReportJson(row.mean);
        j.push_back(r);
      }
      *json_out = Dup(j.dump(2) + "\n");
    }
  });
}

mcihn_status mcihn_sweep(const mcihn_config *config, const mcihn_dataset *train,
                         const mcihn_dataset *valid, const char *key,
                         char **json_out) {
  return Wrap([&] {
    Require(config, "config");
    Require(train, "train");
    Require(valid, "valid");
    Require(key, "key");
    Require(json_out, "json_out");
    const auto points =
        mcihn::RunSweep(config->value, train->value, valid->value, key);
    json j = json::array();
    for (const auto &p : points) {
      json r;
      r[key] = p.value;
      r["val"] = ReportJson(p.val);
      j.push_back(r);
    }
    *json_out = Dup(j.dump(2) + "\n");
  });
}

mcihn_status mcihn_gradcheck(const mcihn_config *config, size_t batch,
                             uint64_t seed, double eps, double *max_error) {
  return Wrap([&] {
    Require(config, "config");
    Require(max_error, "max_error");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    *max_error = mcihn::GradCheckModel(config->value, batch, seed, eps);
  });
}

}  // extern "C"
