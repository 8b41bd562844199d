// tests/pipeline-test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "antispoof/model-io.h"
#include "antispoof/pipeline.h"
#include "antispoof/synthetic.h"
#include "test-util.h"

using namespace antispoof;
using antispoof::testing::ReadFile;
using antispoof::testing::TempDir;

namespace {

using Features = std::vector<FeatureType>;

std::vector<ManifestEntry> SmallCorpus(const TempDir &dir, int per_class = 24) {
  SyntheticCorpusOptions opts;
  opts.num_human = per_class;
  opts.num_spoof = per_class;
  opts.seconds = 0.5;
  opts.num_attacks = 3;
  opts.seed = 17;
  return make_synthetic_corpus(dir.file("corpus"), opts);
}

PipelineConfig SmallConfig(const TempDir &dir, const std::string &models) {
  PipelineConfig cfg = expand_preset("desk");
  cfg.ubm_components = 4;
  cfg.tv_rank = 3;
  cfg.ubm_iters = 3;
  cfg.tv_iters = 2;
  cfg.models_dir = dir.file(models);
  return cfg;
}

std::string ModelBytes(const std::string &dir) {
  std::string all;
  std::vector<std::filesystem::path> files;
  for (const auto &e : std::filesystem::directory_iterator(dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto &f : files) all += f.filename().string() + "\n" + ReadFile(f.string());
  return all;
}

std::string ErrorOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("presets") {
  PipelineConfig c1 = expand_preset("contrastive1");
  CHECK(c1.feature_set ==
        Features{FeatureType::kMfpc, FeatureType::kCosPhasePc, FeatureType::kMwpc});
  CHECK_FALSE(c1.predetector);
  CHECK(c1.classifier == ClassifierKind::kSvm);
  CHECK(c1.ubm_components == 1024);
  CHECK(c1.tv_rank == 400);

  PipelineConfig p = expand_preset("primary");
  CHECK(p.feature_set ==
        Features{FeatureType::kMfcc, FeatureType::kMfpc, FeatureType::kCosPhasePc});
  CHECK(p.ubm_components == 1024);
  CHECK(p.tv_rank == 400);
  CHECK(p.predetector);

  PipelineConfig c2 = expand_preset("contrastive2");
  CHECK(c2.ubm_components == 256);
  CHECK(c2.tv_rank == 200);
  CHECK(c2.classifier == ClassifierKind::kDbn);

  PipelineConfig desk = expand_preset("desk");
  CHECK(desk.feature_set == Features{FeatureType::kMwpc});
  CHECK(desk.ubm_components == 256);
  CHECK(desk.tv_rank == 200);
  CHECK(desk.preset == std::optional<std::string>("desk"));

  CHECK(describe(expand_preset("primary")) == describe(expand_preset("primary")));
  CHECK_THROWS_AS(expand_preset("tertiary"), Error);
}

TEST_CASE("config keys and files") {
  PipelineConfig cfg = expand_preset("desk");
  apply_config_key(&cfg, "features", "MFCC, cosphasepc");
  CHECK(cfg.feature_set == Features{FeatureType::kMfcc, FeatureType::kCosPhasePc});
  apply_config_key(&cfg, "tv-rank", "50");
  CHECK(cfg.tv_rank == 50);
  apply_config_key(&cfg, "predetector", "on");
  CHECK(cfg.predetector);
  apply_config_key(&cfg, "classifier", "dbn");
  CHECK(cfg.classifier == ClassifierKind::kDbn);
  apply_config_key(&cfg, "partitions", "eval");
  CHECK(cfg.partitions == std::vector<Partition>{Partition::kEval});
  apply_config_key(&cfg, "dbn_layers", "32,16");
  CHECK(cfg.dbn_layers == std::vector<int>{32, 16});

  CHECK_THROWS_AS(apply_config_key(&cfg, "features", ""), Error);
  CHECK_THROWS_AS(apply_config_key(&cfg, "features", "MFCC,MFCC"), Error);
  CHECK_THROWS_AS(apply_config_key(&cfg, "features", "LFCC"), Error);
  CHECK_THROWS_AS(apply_config_key(&cfg, "tv_rank", "0"), Error);
  CHECK_THROWS_AS(apply_config_key(&cfg, "tv_rank", "12x"), Error);
  CHECK_THROWS_AS(apply_config_key(&cfg, "classifier", "rf"), Error);
  CHECK_THROWS_AS(apply_config_key(&cfg, "predetector", "maybe"), Error);
  CHECK_THROWS_AS(apply_config_key(&cfg, "colour", "blue"), Error);

  CHECK(is_model_shaping_key("features"));
  CHECK(is_model_shaping_key("tv_rank"));
  CHECK_FALSE(is_model_shaping_key("jobs"));

  TempDir dir("pipeline");
  std::ofstream(dir.file("c.conf")) << "# comment\npreset = primary\n\nseed = 9\n tv_rank=12 \n";
  auto keys = read_config_file(dir.file("c.conf"));
  REQUIRE(keys.size() == 3);
  CHECK(keys[0] == std::make_pair(std::string("preset"), std::string("primary")));
  CHECK(keys[2] == std::make_pair(std::string("tv_rank"), std::string("12")));
  std::ofstream(dir.file("bad.conf")) << "seed 9\n";
  CHECK(ErrorOf([&] { read_config_file(dir.file("bad.conf")); }).find(":1:") != std::string::npos);
  CHECK_THROWS_AS(read_config_file(dir.file("none.conf")), Error);
}

TEST_CASE("train and score are reproducible and leave models untouched") {
  TempDir dir("pipeline");
  auto manifest = SmallCorpus(dir);
  const std::string base = dir.file("corpus");
  PipelineConfig a = SmallConfig(dir, "a"), b = SmallConfig(dir, "b");
  b.jobs = 3;
  TrainSummary sa = cmd_train(a, manifest, base);
  cmd_train(b, manifest, base);
  CHECK(sa.num_train_utts == 24);
  CHECK(sa.ubm_log_likelihood.at("MWPC").size() == 4);
  CHECK(sa.tv_objective.at("MWPC").size() == 3);
  for (const char *f : {"frontend.spgd", "ubm.MWPC.spgd", "tv.MWPC.spgd", "backend.spgd",
                        "classifier.spgd"})
    CHECK(std::filesystem::exists(std::filesystem::path(a.models_dir) / f));
  std::string models_a = ModelBytes(a.models_dir);
  CHECK(models_a == ModelBytes(b.models_dir));

  std::vector<Score> s1 = cmd_score(a, manifest, base);
  std::vector<Score> s2 = cmd_score(b, manifest, base);
  REQUIRE(s1.size() == 24);
  CHECK(std::is_sorted(s1.begin(), s1.end(),
                       [](const Score &x, const Score &y) { return x.utt_id < y.utt_id; }));
  std::ostringstream o1, o2;
  write_scores(o1, s1);
  write_scores(o2, s2);
  CHECK(o1.str() == o2.str());
  CHECK(ModelBytes(a.models_dir) == models_a);

  EvalReport report = cmd_eval(s1, manifest, "desk");
  CHECK(report.result.eer_overall <= 10.0);
  CHECK(report.table.find("desk All: ") != std::string::npos);
  CHECK(report.tsv.rfind("system\tS1\tS2\tS3\tAll\tthreshold\n", 0) == 0);

  TrainedSystem sys = load_trained_system(a.models_dir);
  CHECK(sys.config.feature_set == a.feature_set);
  CHECK(sys.svm.has_value());
  CHECK(sys.ivector_mean.size() == 3);
  IVector iv = utterance_ivector(sys, load_entry(manifest.back(), base));
  CHECK(iv.normalized);
  CHECK(std::abs(iv.values.norm() - 1.0) < 1e-12);

  // project-lda: one row per dev utterance, utt_id class p1 p2
  PipelineConfig lda_cfg = a;
  lda_cfg.partitions = {Partition::kDev};
  std::istringstream rows(cmd_project_lda(lda_cfg, manifest, base));
  std::string line, prev;
  int count = 0;
  while (std::getline(rows, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, '\t')) fields.push_back(f);
    CHECK(fields.size() == 2 + 3);  // 4 classes, so 3 directions
    CHECK(fields[0] > prev);
    prev = fields[0];
    ++count;
  }
  CHECK(count == 24);
}

TEST_CASE("pre-detector sentinel and model/config mismatch") {
  TempDir dir("pipeline");
  auto manifest = SmallCorpus(dir, 20);
  const std::string base = dir.file("corpus");
  write_waveform((std::filesystem::path(base) / "silent.wav").string(),
                 Waveform{VectorXd::Zero(8000), 16000});
  manifest.push_back({"Z_silent", "silent.wav", Label::kSpoof, 1, Partition::kEval});
  PipelineConfig cfg = SmallConfig(dir, "m");
  cmd_train(cfg, manifest, base);
  TrainedSystem sys = load_trained_system(cfg.models_dir);
  Waveform silent = load_entry(manifest.back(), base);

  cfg.predetector = true;
  CHECK(score_waveform(cfg, sys, silent) == kPredetectorScore);
  std::vector<Score> scores = cmd_score(cfg, manifest, base);
  CHECK(scores.back().utt_id == "Z_silent");
  CHECK(scores.back().value == -1e9);
  cfg.predetector = false;
  double full = score_waveform(cfg, sys, silent);
  CHECK(std::isfinite(full));
  CHECK(full != kPredetectorScore);

  PipelineConfig wrong = cfg;
  wrong.tv_rank = 5;
  CHECK(ErrorOf([&] { cmd_score(wrong, manifest, base); }).find("mismatch") != std::string::npos);
  wrong = cfg;
  wrong.feature_set = {FeatureType::kMfcc};
  CHECK_THROWS_AS(cmd_score(wrong, manifest, base), Error);

  // a corrupted model file is caught at load time
  std::filesystem::copy_file(std::filesystem::path(cfg.models_dir) / "ubm.MWPC.spgd",
                             std::filesystem::path(cfg.models_dir) / "tv.MWPC.spgd",
                             std::filesystem::copy_options::overwrite_existing);
  CHECK_THROWS_AS(load_trained_system(cfg.models_dir), Error);
}

TEST_CASE("training errors name the stage") {
  TempDir dir("pipeline");
  auto manifest = SmallCorpus(dir, 12);
  const std::string base = dir.file("corpus");
  PipelineConfig cfg = SmallConfig(dir, "m");

  std::vector<ManifestEntry> humans_only;
  for (const auto &e : manifest)
    if (e.label == Label::kHuman) humans_only.push_back(e);
  CHECK_THROWS_AS(cmd_train(cfg, humans_only, base), Error);

  cfg.ubm_components = 4000;
  CHECK(ErrorOf([&] { cmd_train(cfg, manifest, base); }).find("stage 'ubm MWPC'") !=
        std::string::npos);
  cfg.ubm_components = 4;
  cfg.tv_rank = 50;
  CHECK(ErrorOf([&] { cmd_train(cfg, manifest, base); }).find("stage 'tv MWPC'") !=
        std::string::npos);

  auto missing = manifest;
  missing.front().path = "nowhere.wav";
  cfg.tv_rank = 3;
  CHECK_THROWS_AS(cmd_train(cfg, missing, base), Error);
}

TEST_CASE("fused features and the DBN back end") {
  TempDir dir("pipeline");
  auto manifest = SmallCorpus(dir, 16);
  const std::string base = dir.file("corpus");
  PipelineConfig cfg = SmallConfig(dir, "m");
  cfg.feature_set = {FeatureType::kMfcc, FeatureType::kCosPhasePc};
  cfg.classifier = ClassifierKind::kDbn;
  cfg.dbn_layers = {8};
  cfg.rbm_epochs = 2;
  cfg.dbn_epochs = 20;
  cmd_train(cfg, manifest, base);
  TrainedSystem sys = load_trained_system(cfg.models_dir);
  CHECK(sys.dbn.has_value());
  CHECK(sys.tv.size() == 2);
  CHECK(sys.ivector_mean.size() == 6);
  std::vector<Score> scores = cmd_score(cfg, manifest, base);
  CHECK(scores.size() == 16);
  for (const Score &s : scores) CHECK(std::isfinite(s.value));
}

TEST_CASE("cmd_eval toy reports") {
  std::vector<ManifestEntry> m{{"g1", "g1.wav", Label::kHuman, kNoAttack, Partition::kDev},
                               {"g2", "g2.wav", Label::kHuman, kNoAttack, Partition::kDev},
                               {"s1", "s1.wav", Label::kSpoof, 2, Partition::kDev},
                               {"s2", "s2.wav", Label::kSpoof, 2, Partition::kDev}};
  EvalReport crossed = cmd_eval({{"g1", 0.8}, {"g2", 0.4}, {"s1", 0.6}, {"s2", 0.2}}, m);
  CHECK(crossed.table.find("All: 50.00") != std::string::npos);
  EvalReport clean = cmd_eval({{"g1", 0.8}, {"g2", 0.9}, {"s1", 0.1}, {"s2", 0.2}}, m);
  CHECK(clean.table.find("All: 0.00") != std::string::npos);
  CHECK(clean.tsv.rfind("system\tS2\tAll", 0) == 0);
  CHECK(ErrorOf([&] { cmd_eval({{"g9", 0.1}}, m); }).find("g9") != std::string::npos);
}
