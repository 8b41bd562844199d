// antispoof/pipeline.h

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

#ifndef ANTISPOOF_PIPELINE_H_
#define ANTISPOOF_PIPELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "antispoof/dbn.h"
#include "antispoof/eval.h"
#include "antispoof/features.h"
#include "antispoof/ivector.h"
#include "antispoof/svm.h"

namespace antispoof {

enum class ClassifierKind { kSvm = 0, kDbn = 1 };

/// Score assigned when the pre-detector fires.
inline constexpr double kPredetectorScore = -1e9;

struct PipelineConfig {
  std::vector<FeatureType> feature_set{FeatureType::kMwpc};
  int ubm_components = 256;
  int tv_rank = 200;
  ClassifierKind classifier = ClassifierKind::kSvm;
  bool predetector = false;
  std::size_t predetector_min_run = kDefaultZeroRun;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::optional<std::string> preset;

  std::string manifest;
  std::string models_dir;
  std::string out;
  /// Partitions cmd_score / project-lda operate on.
  std::vector<Partition> partitions{Partition::kDev, Partition::kEval};

  int ubm_iters = 10;
  int tv_iters = 5;
  std::size_t max_pca_frames = 500000;
  std::size_t max_ubm_frames = 500000;

  double svm_c = 1.0;
  double human_weight = 1.0;
  std::vector<int> dbn_layers{256, 256};
  int rbm_epochs = 10;
  double rbm_learning_rate = 0.01;
  int dbn_epochs = 100;
  double dbn_learning_rate = 0.1;
  double dbn_weight_decay = 0.0;
};

/// primary | contrastive1 | contrastive2 | desk. Throws on other names.
PipelineConfig expand_preset(const std::string &name);

/// Sets one configuration key from its text form ("features = MFCC,MFPC").
void apply_config_key(PipelineConfig *cfg, const std::string &key, const std::string &value);

/// Parses "key = value" lines ('#' comments) into ordered pairs.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string &path);

std::string describe(const PipelineConfig &cfg);

/// Keys that change the trained models (as opposed to run-time options).
bool is_model_shaping_key(const std::string &key);

/// Copies the model-shaping fields of `stored` into `cfg`.
void adopt_model_config(PipelineConfig *cfg, const PipelineConfig &stored);

/// Loaded, ready-to-score models.
struct TrainedSystem {
  PipelineConfig config;  // model-shaping fields only
  FrontEndModels front_end;
  std::vector<TvModel> tv;  // one per feature type, in feature_set order
  VectorXd ivector_mean;
  std::optional<LinearSvmModel> svm;
  std::optional<DbnModel> dbn;
};

struct TrainSummary {
  std::map<std::string, std::vector<double>> ubm_log_likelihood;  // per feature
  std::map<std::string, std::vector<double>> tv_objective;        // per feature
  std::size_t num_train_utts = 0;
  double classifier_objective = 0.0;
};

/// Fits every stage on the train partition and writes one model container
/// per stage into cfg.models_dir. Relative WAV paths resolve against
/// `base_dir`.
TrainSummary cmd_train(const PipelineConfig &cfg, const std::vector<ManifestEntry> &manifest,
                       const std::string &base_dir);

TrainedSystem load_trained_system(const std::string &models_dir);

/// Throws if the model-shaping fields of `cfg` differ from the models.
void check_config_matches(const PipelineConfig &cfg, const TrainedSystem &sys);

/// Fused, centered, length-normalized i-vector of one waveform.
IVector utterance_ivector(const TrainedSystem &sys, const Waveform &w);

/// Scores one waveform, including the pre-detector when enabled in `cfg`.
double score_waveform(const PipelineConfig &cfg, const TrainedSystem &sys, const Waveform &w);

/// Scores the manifest entries in cfg.partitions, sorted by utt_id.
std::vector<Score> cmd_score(const PipelineConfig &cfg, const std::vector<ManifestEntry> &manifest,
                             const std::string &base_dir);

struct EvalReport {
  EerResult result;
  std::string table;  // human-readable
  std::string tsv;    // machine-readable
};

EvalReport cmd_eval(const std::vector<Score> &scores,
                    const std::vector<ManifestEntry> &manifest,
                    const std::string &system_name = "system");

/// Fits LDA on the train partition's i-vectors (classes: human, S1..S10)
/// and projects the entries in cfg.partitions. Returns the TSV text
/// "utt_id<TAB>class<TAB>p1<TAB>p2<TAB>p3" sorted by utt_id.
std::string cmd_project_lda(const PipelineConfig &cfg,
                            const std::vector<ManifestEntry> &manifest,
                            const std::string &base_dir);

/// Resolves a manifest path against base_dir and loads the waveform.
Waveform load_entry(const ManifestEntry &e, const std::string &base_dir);

}  // namespace antispoof

#endif  // ANTISPOOF_PIPELINE_H_
