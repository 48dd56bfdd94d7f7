// tools/mcihn_cli.cpp

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

// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcihn/mcihn.h"

namespace {

class CliFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void Check(mcihn_status status, const std::string &context) {
  if (status != MCIHN_OK)
    throw CliFailure(context + ": " + mcihn_status_name(status) + ": " +
                     mcihn_last_error());
}

struct ConfigDeleter {
  void operator()(mcihn_config *c) const { mcihn_config_free(c); }
};
struct DatasetDeleter {
  void operator()(mcihn_dataset *d) const { mcihn_dataset_free(d); }
};
struct ModelDeleter {
  void operator()(mcihn_model *m) const { mcihn_model_free(m); }
};
struct StringDeleter {
  void operator()(char *s) const { mcihn_string_free(s); }
};
using ConfigPtr = std::unique_ptr<mcihn_config, ConfigDeleter>;
using DatasetPtr = std::unique_ptr<mcihn_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<mcihn_model, ModelDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

// Options shared by every subcommand that builds a configuration.
struct ConfigOptions {
  std::string file;
  std::vector<std::string> overrides;

  void Attach(CLI::App *app) {
    app->add_option("-c,--config", file, "key=value configuration file")
        ->check(CLI::ExistingFile);
    app->add_option("--set", overrides, "override one key, as key=value")
        ->allow_extra_args(false);
  }

  ConfigPtr Build() const {
    mcihn_config *raw = nullptr;
    if (file.empty())
      Check(mcihn_config_new(&raw), "config");
    else
      Check(mcihn_config_load(file.c_str(), &raw), "config " + file);
    ConfigPtr config(raw);
    for (const std::string &kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0)
        throw CliFailure("--set expects key=value, got '" + kv + "'");
      const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
      Check(mcihn_config_set(config.get(), key.c_str(), value.c_str()),
            "--set " + kv);
    }
    return config;
  }
};

DatasetPtr ReadData(const std::string &path) {
  mcihn_dataset *raw = nullptr;
  Check(mcihn_dataset_read(path.c_str(), &raw), "read " + path);
  return DatasetPtr(raw);
}

std::string Take(char *s) {
  StringPtr owned(s);
  return owned ? std::string(owned.get()) : std::string();
}

void WriteFile(const std::filesystem::path &path, const std::string &text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw CliFailure("cannot write " + path.string());
  os << text;
}

std::vector<std::uint64_t> ParseSeeds(const std::string &text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used != item.size()) throw CliFailure("bad seed '" + item + "'");
    seeds.push_back(v);
  }
  if (seeds.empty()) throw CliFailure("--seeds needs at least one value");
  return seeds;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"mcihn: multimodal sentiment model training and evaluation"};
  app.name("mcihn-cli");
  app.require_subcommand(1);

  // synth-gen
  CLI::App *synth = app.add_subcommand("synth-gen", "write a synthetic MCIH feature file");
  ConfigOptions synth_cfg;
  std::string synth_out, synth_labels = "uniform", synth_scheme = "mosi7";
  mcihn_synth_options synth_opts{64, 0.5, nullptr, nullptr, 0, 0};
  synth_cfg.Attach(synth);
  synth->add_option("-o,--out", synth_out, "output path")->required();
  synth->add_option("-n,--count", synth_opts.count, "number of samples");
  synth->add_option("--rho", synth_opts.rho, "signal weight in [0, 1]");
  synth->add_option("--labels", synth_labels, "uniform | mosi7 | sims5");
  synth->add_option("--scheme", synth_scheme, "header scheme tag: mosi7 | sims5");
  synth->add_option("--seed", synth_opts.seed, "label and noise seed");
  synth->add_option("--pattern-seed", synth_opts.pattern_seed,
                    "planted-pattern seed (share across splits)");

  // train
  CLI::App *train = app.add_subcommand("train", "train a model and write a run directory");
  ConfigOptions train_cfg;
  std::string train_path, valid_path, run_dir;
  train_cfg.Attach(train);
  train->add_option("--train", train_path, "training MCIH file")->required()->check(CLI::ExistingFile);
  train->add_option("--valid", valid_path, "validation MCIH file")->required()->check(CLI::ExistingFile);
  train->add_option("-o,--run-dir", run_dir, "output directory")->required();

  // eval
  CLI::App *eval = app.add_subcommand("eval", "score a checkpoint on a dataset");
  std::string eval_ckpt, eval_data, eval_out;
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required()->check(CLI::ExistingFile);
  eval->add_option("--data", eval_data, "MCIH file")->required()->check(CLI::ExistingFile);
  eval->add_option("-o,--out", eval_out, "also write the metrics JSON here");

  // ablate
  CLI::App *ablate = app.add_subcommand("ablate", "train every ablation variant over seeds");
  ConfigOptions ablate_cfg;
  std::string ab_train, ab_valid, ab_seeds = "0,1,2,3,4", ab_out;
  ablate_cfg.Attach(ablate);
  ablate->add_option("--train", ab_train, "training MCIH file")->required()->check(CLI::ExistingFile);
  ablate->add_option("--valid", ab_valid, "validation MCIH file")->required()->check(CLI::ExistingFile);
  ablate->add_option("--seeds", ab_seeds, "comma-separated seeds");
  ablate->add_option("-o,--out", ab_out, "write per-seed JSON here");

  // sweep
  CLI::App *sweep = app.add_subcommand("sweep", "grid over dropout or adaptation_weight");
  ConfigOptions sweep_cfg;
  std::string sw_train, sw_valid, sw_key = "dropout", sw_out;
  sweep_cfg.Attach(sweep);
  sweep->add_option("--train", sw_train, "training MCIH file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--valid", sw_valid, "validation MCIH file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--key", sw_key, "dropout | adaptation_weight");
  sweep->add_option("-o,--out", sw_out, "write JSON here");

  // gradcheck
  CLI::App *gradcheck = app.add_subcommand("gradcheck", "finite-difference check of the combined loss");
  ConfigOptions gc_cfg;
  std::size_t gc_batch = 2;
  std::uint64_t gc_seed = 0;
  double gc_eps = 1e-5, gc_tol = 1e-4;
  gc_cfg.Attach(gradcheck);
  gradcheck->add_option("--batch", gc_batch, "samples in the checked batch");
  gradcheck->add_option("--seed", gc_seed, "data and init seed");
  gradcheck->add_option("--eps", gc_eps, "central-difference step");
  gradcheck->add_option("--tol", gc_tol, "fail above this relative error");

  // data-info
  CLI::App *info = app.add_subcommand("data-info", "print an MCIH file header as JSON");
  std::string info_path;
  info->add_option("path", info_path, "MCIH file")->required()->check(CLI::ExistingFile);

  if (argc <= 1) {
    std::cerr << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    std::cerr << app.help();
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    if (*synth) {
      ConfigPtr config = synth_cfg.Build();
      synth_opts.labels = synth_labels.c_str();
      synth_opts.scheme = synth_scheme.c_str();
      mcihn_dataset *raw = nullptr;
      Check(mcihn_dataset_synthesize(config.get(), &synth_opts, &raw), "synth-gen");
      DatasetPtr data(raw);
      Check(mcihn_dataset_write(data.get(), synth_out.c_str()), "write " + synth_out);
      std::cout << "wrote " << mcihn_dataset_size(data.get()) << " samples to "
                << synth_out << "\n";
    } else if (*train) {
      ConfigPtr config = train_cfg.Build();
      DatasetPtr tr = ReadData(train_path), va = ReadData(valid_path);
      mcihn_model *raw = nullptr;
      Check(mcihn_train(config.get(), tr.get(), va.get(), run_dir.c_str(), &raw), "train");
      ModelPtr model(raw);
      char *json = nullptr;
      Check(mcihn_evaluate(model.get(), va.get(), &json), "evaluate");
      std::cout << Take(json);
      std::cout << "\nrun directory: " << run_dir << "\n";
    } else if (*eval) {
      mcihn_model *raw = nullptr;
      Check(mcihn_model_load(eval_ckpt.c_str(), &raw), "load " + eval_ckpt);
      ModelPtr model(raw);
      DatasetPtr data = ReadData(eval_data);
      char *json = nullptr;
      Check(mcihn_evaluate(model.get(), data.get(), &json), "evaluate");
      const std::string text = Take(json) + "\n";
      std::cout << text;
      if (!eval_out.empty()) WriteFile(eval_out, text);
    } else if (*ablate) {
      ConfigPtr config = ablate_cfg.Build();
      DatasetPtr tr = ReadData(ab_train), va = ReadData(ab_valid);
      const auto seeds = ParseSeeds(ab_seeds);
      char *table = nullptr, *json = nullptr;
      Check(mcihn_ablate(config.get(), tr.get(), va.get(), seeds.data(),
                         seeds.size(), &table, &json),
            "ablate");
      std::cout << Take(table);
      const std::string js = Take(json);
      if (!ab_out.empty()) WriteFile(ab_out, js);
    } else if (*sweep) {
      ConfigPtr config = sweep_cfg.Build();
      DatasetPtr tr = ReadData(sw_train), va = ReadData(sw_valid);
      char *json = nullptr;
      Check(mcihn_sweep(config.get(), tr.get(), va.get(), sw_key.c_str(), &json), "sweep");
      const std::string js = Take(json);
      std::cout << js;
      if (!sw_out.empty()) WriteFile(sw_out, js);
    } else if (*gradcheck) {
      ConfigPtr config = gc_cfg.Build();
      double err = 0.0;
      Check(mcihn_gradcheck(config.get(), gc_batch, gc_seed, gc_eps, &err), "gradcheck");
      std::printf("max relative error: %.3e (tolerance %.1e)\n", err, gc_tol);
      return err < gc_tol ? 0 : 1;
    } else if (*info) {
      DatasetPtr data = ReadData(info_path);
      char *json = nullptr;
      Check(mcihn_dataset_info_json(data.get(), &json), "data-info");
      std::cout << Take(json) << "\n";
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
