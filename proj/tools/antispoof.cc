// tools/antispoof.cc

// Copyright 2026  The antispoof authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Batch front end: train, score, eval, project-lda.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "antispoof/pipeline.h"

using namespace antispoof;

namespace {

struct Flags {
  std::string config, manifest, models, out, preset, features, scores, name = "system";
  std::string classifier, predetector, partitions;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs, ubm_components, tv_rank;
  bool quiet = false;
};

void AddCommon(CLI::App *cmd, Flags *f) {
  cmd->add_option("--config", f->config, "Config file with key = value lines");
  cmd->add_option("--manifest", f->manifest, "Protocol file");
  cmd->add_option("--models", f->models, "Model directory");
  cmd->add_option("--out", f->out, "Output file");
  cmd->add_option("--preset", f->preset, "System preset")
      ->check(CLI::IsMember({"primary", "contrastive1", "contrastive2", "desk"}));
  cmd->add_option("--features", f->features, "Feature list, e.g. MFPC,CosPhasePC");
  cmd->add_option("--seed", f->seed, "Random seed");
  cmd->add_option("--jobs", f->jobs, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--ubm-components", f->ubm_components, "UBM size");
  cmd->add_option("--tv-rank", f->tv_rank, "Total variability rank");
  cmd->add_option("--classifier", f->classifier, "svm or dbn");
  cmd->add_option("--predetector", f->predetector, "on or off");
  cmd->add_option("--partitions", f->partitions, "Partitions to score, e.g. dev,eval");
  cmd->add_flag("--quiet", f->quiet, "No log output");
}

// Preset first, then config-file keys, then flags. `shaping` collects the
// model-shaping keys that were set explicitly.
PipelineConfig BuildConfig(const Flags &f, std::set<std::string> *shaping) {
  std::vector<std::pair<std::string, std::string>> file_keys;
  if (!f.config.empty()) file_keys = read_config_file(f.config);
  std::string preset = "desk";
  bool preset_given = false;
  for (const auto &[k, v] : file_keys)
    if (k == "preset") preset = v, preset_given = true;
  if (!f.preset.empty()) preset = f.preset, preset_given = true;
  PipelineConfig cfg = expand_preset(preset);
  if (preset_given) shaping->insert("preset");
  for (const auto &[k, v] : file_keys) {
    if (k == "preset") continue;
    apply_config_key(&cfg, k, v);
    if (is_model_shaping_key(k)) shaping->insert(k);
  }
  auto set = [&](const std::string &key, const std::string &value) {
    apply_config_key(&cfg, key, value);
    if (is_model_shaping_key(key)) shaping->insert(key);
  };
  if (!f.features.empty()) set("features", f.features);
  if (f.ubm_components) set("ubm_components", std::to_string(*f.ubm_components));
  if (f.tv_rank) set("tv_rank", std::to_string(*f.tv_rank));
  if (!f.classifier.empty()) set("classifier", f.classifier);
  if (!f.predetector.empty()) set("predetector", f.predetector);
  if (!f.partitions.empty()) set("partitions", f.partitions);
  if (f.seed) set("seed", std::to_string(*f.seed));
  if (f.jobs) set("jobs", std::to_string(*f.jobs));
  if (!f.manifest.empty()) cfg.manifest = f.manifest;
  if (!f.models.empty()) cfg.models_dir = f.models;
  if (!f.out.empty()) cfg.out = f.out;
  return cfg;
}

std::string Require(const std::string &value, const std::string &flag) {
  if (value.empty()) throw Error("missing required " + flag);
  return value;
}

std::string BaseDir(const std::string &manifest) {
  return std::filesystem::path(manifest).parent_path().string();
}

void WriteText(const std::string &path, const std::string &text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  os << text;
  if (!os) throw Error("write failed: " + path);
}

int RunTrain(const Flags &f) {
  std::set<std::string> shaping;
  PipelineConfig cfg = BuildConfig(f, &shaping);
  Require(cfg.manifest, "--manifest");
  Require(cfg.models_dir, "--models");
  TrainSummary s = cmd_train(cfg, parse_manifest(cfg.manifest), BaseDir(cfg.manifest));
  for (const auto &[name, ll] : s.ubm_log_likelihood)
    LogLine() << name << " UBM log-likelihood: " << ll.front() << " -> " << ll.back();
  for (const auto &[name, obj] : s.tv_objective)
    if (!obj.empty()) LogLine() << name << " TV objective: " << obj.front() << " -> " << obj.back();
  LogLine() << "classifier objective: " << s.classifier_objective;
  return 0;
}

int RunScore(const Flags &f) {
  std::set<std::string> shaping;
  PipelineConfig cfg = BuildConfig(f, &shaping);
  Require(cfg.manifest, "--manifest");
  Require(cfg.models_dir, "--models");
  Require(cfg.out, "--out");
  if (shaping.empty()) {
    TrainedSystem sys = load_trained_system(cfg.models_dir);
    adopt_model_config(&cfg, sys.config);
  }
  std::vector<antispoof::Score> scores =
      cmd_score(cfg, parse_manifest(cfg.manifest), BaseDir(cfg.manifest));
  write_scores(cfg.out, scores);
  return 0;
}

int RunEval(const Flags &f) {
  std::set<std::string> shaping;
  PipelineConfig cfg = BuildConfig(f, &shaping);
  Require(cfg.manifest, "--manifest");
  EvalReport r = cmd_eval(read_scores(Require(f.scores, "--scores")),
                          parse_manifest(cfg.manifest), f.name);
  std::cout << r.table;
  if (!cfg.out.empty()) WriteText(cfg.out, r.tsv);
  return 0;
}

int RunProjectLda(const Flags &f) {
  std::set<std::string> shaping;
  PipelineConfig cfg = BuildConfig(f, &shaping);
  Require(cfg.manifest, "--manifest");
  Require(cfg.models_dir, "--models");
  Require(cfg.out, "--out");
  if (f.partitions.empty()) cfg.partitions = {Partition::kDev};
  if (shaping.empty()) {
    TrainedSystem sys = load_trained_system(cfg.models_dir);
    adopt_model_config(&cfg, sys.config);
  }
  WriteText(cfg.out, cmd_project_lda(cfg, parse_manifest(cfg.manifest), BaseDir(cfg.manifest)));
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Spoofed speech detection with i-vectors"};
  app.require_subcommand(1);
  Flags train_f, score_f, eval_f, lda_f;
  CLI::App *train = app.add_subcommand("train", "Fit all models on the train partition");
  CLI::App *score = app.add_subcommand("score", "Score dev/eval utterances");
  CLI::App *eval = app.add_subcommand("eval", "EER report from a score file");
  CLI::App *lda = app.add_subcommand("project-lda", "LDA projection of i-vectors");
  AddCommon(train, &train_f);
  AddCommon(score, &score_f);
  AddCommon(eval, &eval_f);
  AddCommon(lda, &lda_f);
  eval->add_option("--scores", eval_f.scores, "Score file")->required();
  eval->add_option("--name", eval_f.name, "System name in the report");
  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      SetLoggingEnabled(!train_f.quiet);
      return RunTrain(train_f);
    }
    if (*score) {
      SetLoggingEnabled(!score_f.quiet);
      return RunScore(score_f);
    }
    if (*eval) {
      SetLoggingEnabled(!eval_f.quiet);
      return RunEval(eval_f);
    }
    SetLoggingEnabled(!lda_f.quiet);
    return RunProjectLda(lda_f);
  } catch (const std::exception &e) {
    std::fprintf(stderr, "antispoof: %s\n", e.what());
    return 1;
  }
}
