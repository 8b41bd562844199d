// antispoof/pipeline.cc

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

#include "antispoof/pipeline.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "antispoof/model-io.h"

namespace antispoof {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

PipelineConfig expand_preset(const std::string &name) {
  PipelineConfig cfg;
  cfg.preset = name;
  if (name == "primary") {
    cfg.feature_set = {FeatureType::kMfcc, FeatureType::kMfpc, FeatureType::kCosPhasePc};
    cfg.ubm_components = 1024;
    cfg.tv_rank = 400;
    cfg.classifier = ClassifierKind::kSvm;
    cfg.predetector = true;
  } else if (name == "contrastive1") {
    cfg.feature_set = {FeatureType::kMfpc, FeatureType::kCosPhasePc, FeatureType::kMwpc};
    cfg.ubm_components = 1024;
    cfg.tv_rank = 400;
    cfg.classifier = ClassifierKind::kSvm;
    cfg.predetector = false;
  } else if (name == "contrastive2") {
    cfg.feature_set = {FeatureType::kMfpc, FeatureType::kCosPhasePc, FeatureType::kMwpc};
    cfg.ubm_components = 256;
    cfg.tv_rank = 200;
    cfg.classifier = ClassifierKind::kDbn;
    cfg.predetector = false;
  } else if (name == "desk") {
    cfg.feature_set = {FeatureType::kMwpc};
    cfg.ubm_components = 256;
    cfg.tv_rank = 200;
    cfg.classifier = ClassifierKind::kSvm;
    cfg.predetector = false;
  } else {
    throw Error("unknown preset '" + name +
                "' (expected primary, contrastive1, contrastive2 or desk)");
  }
  return cfg;
}

namespace {

std::string Trim(const std::string &s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitList(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

long long ParseInt(const std::string &key, const std::string &v) {
  try {
    std::size_t used = 0;
    long long x = std::stoll(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception &) {
  }
  throw Error("config key '" + key + "' expects an integer, got '" + v + "'");
}

double ParseDouble(const std::string &key, const std::string &v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception &) {
  }
  throw Error("config key '" + key + "' expects a number, got '" + v + "'");
}

bool ParseBool(const std::string &key, const std::string &v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw Error("config key '" + key + "' expects on/off, got '" + v + "'");
}

int ParsePositive(const std::string &key, const std::string &v) {
  long long x = ParseInt(key, v);
  if (x < 1) throw Error("config key '" + key + "' must be positive");
  return static_cast<int>(x);
}

const std::set<std::string> &ModelShapingKeys() {
  static const std::set<std::string> keys = {
      "features", "ubm_components", "tv_rank", "classifier", "preset"};
  return keys;
}

}  // namespace

bool is_model_shaping_key(const std::string &key) {
  return ModelShapingKeys().count(key) != 0;
}

void apply_config_key(PipelineConfig *cfg, const std::string &key_in,
                      const std::string &value_in) {
  std::string key = Trim(key_in), v = Trim(value_in);
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "preset") {
    PipelineConfig fresh = expand_preset(v);
    fresh.manifest = cfg->manifest;
    fresh.models_dir = cfg->models_dir;
    fresh.out = cfg->out;
    fresh.jobs = cfg->jobs;
    fresh.seed = cfg->seed;
    *cfg = fresh;
  } else if (key == "features") {
    std::vector<FeatureType> set;
    for (const std::string &name : SplitList(v)) {
      auto t = parse_feature_type(name);
      if (!t) throw Error("unknown feature type '" + name + "'");
      if (std::find(set.begin(), set.end(), *t) != set.end())
        throw Error("feature type '" + name + "' listed twice");
      set.push_back(*t);
    }
    if (set.empty()) throw Error("feature set must not be empty");
    cfg->feature_set = set;
  } else if (key == "ubm_components") {
    cfg->ubm_components = ParsePositive(key, v);
  } else if (key == "tv_rank") {
    cfg->tv_rank = ParsePositive(key, v);
  } else if (key == "classifier") {
    if (v == "svm") cfg->classifier = ClassifierKind::kSvm;
    else if (v == "dbn") cfg->classifier = ClassifierKind::kDbn;
    else throw Error("classifier must be svm or dbn, got '" + v + "'");
  } else if (key == "predetector") {
    cfg->predetector = ParseBool(key, v);
  } else if (key == "predetector_min_run") {
    cfg->predetector_min_run = static_cast<std::size_t>(ParsePositive(key, v));
  } else if (key == "seed") {
    cfg->seed = static_cast<std::uint64_t>(ParseInt(key, v));
  } else if (key == "jobs") {
    cfg->jobs = ParsePositive(key, v);
  } else if (key == "manifest") {
    cfg->manifest = v;
  } else if (key == "models") {
    cfg->models_dir = v;
  } else if (key == "out") {
    cfg->out = v;
  } else if (key == "partitions") {
    cfg->partitions.clear();
    for (const std::string &p : SplitList(v)) {
      if (p == "train") cfg->partitions.push_back(Partition::kTrain);
      else if (p == "dev") cfg->partitions.push_back(Partition::kDev);
      else if (p == "eval") cfg->partitions.push_back(Partition::kEval);
      else throw Error("unknown partition '" + p + "'");
    }
    if (cfg->partitions.empty()) throw Error("partition list must not be empty");
  } else if (key == "ubm_iters") {
    cfg->ubm_iters = static_cast<int>(ParseInt(key, v));
  } else if (key == "tv_iters") {
    cfg->tv_iters = static_cast<int>(ParseInt(key, v));
  } else if (key == "max_pca_frames") {
    cfg->max_pca_frames = static_cast<std::size_t>(ParsePositive(key, v));
  } else if (key == "max_ubm_frames") {
    cfg->max_ubm_frames = static_cast<std::size_t>(ParsePositive(key, v));
  } else if (key == "svm_c") {
    cfg->svm_c = ParseDouble(key, v);
  } else if (key == "human_weight") {
    cfg->human_weight = ParseDouble(key, v);
  } else if (key == "dbn_layers") {
    cfg->dbn_layers.clear();
    for (const std::string &d : SplitList(v)) cfg->dbn_layers.push_back(ParsePositive(key, d));
    if (cfg->dbn_layers.empty()) throw Error("dbn_layers must not be empty");
  } else if (key == "rbm_epochs") {
    cfg->rbm_epochs = static_cast<int>(ParseInt(key, v));
  } else if (key == "rbm_learning_rate") {
    cfg->rbm_learning_rate = ParseDouble(key, v);
  } else if (key == "dbn_epochs") {
    cfg->dbn_epochs = static_cast<int>(ParseInt(key, v));
  } else if (key == "dbn_learning_rate") {
    cfg->dbn_learning_rate = ParseDouble(key, v);
  } else if (key == "dbn_weight_decay") {
    cfg->dbn_weight_decay = ParseDouble(key, v);
  } else {
    throw Error("unknown config key '" + key + "'");
  }
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    out.emplace_back(Trim(t.substr(0, eq)), Trim(t.substr(eq + 1)));
  }
  return out;
}

std::string describe(const PipelineConfig &cfg) {
  std::ostringstream os;
  os << "features=";
  for (std::size_t i = 0; i < cfg.feature_set.size(); ++i)
    os << (i ? "," : "") << feature_name(cfg.feature_set[i]);
  os << " ubm_components=" << cfg.ubm_components << " tv_rank=" << cfg.tv_rank
     << " classifier=" << (cfg.classifier == ClassifierKind::kSvm ? "svm" : "dbn")
     << " predetector=" << (cfg.predetector ? "on" : "off") << " seed=" << cfg.seed;
  if (cfg.preset) os << " preset=" << *cfg.preset;
  return os.str();
}

void adopt_model_config(PipelineConfig *cfg, const PipelineConfig &stored) {
  cfg->feature_set = stored.feature_set;
  cfg->ubm_components = stored.ubm_components;
  cfg->tv_rank = stored.tv_rank;
  cfg->classifier = stored.classifier;
}

// ---------------------------------------------------------------------------
// Model files

namespace {

std::string UbmFile(const std::string &dir, FeatureType t) {
  return (fs::path(dir) / ("ubm." + std::string(feature_name(t)) + ".spgd")).string();
}
std::string TvFile(const std::string &dir, FeatureType t) {
  return (fs::path(dir) / ("tv." + std::string(feature_name(t)) + ".spgd")).string();
}
std::string FrontEndFile(const std::string &dir) {
  return (fs::path(dir) / "frontend.spgd").string();
}
std::string BackendFile(const std::string &dir) {
  return (fs::path(dir) / "backend.spgd").string();
}
std::string ClassifierFile(const std::string &dir) {
  return (fs::path(dir) / "classifier.spgd").string();
}

void SaveBackend(const std::string &path, const PipelineConfig &cfg, const VectorXd &mean) {
  ModelContainer c;
  VectorXd codes(cfg.feature_set.size());
  for (std::size_t i = 0; i < cfg.feature_set.size(); ++i)
    codes(Eigen::Index(i)) = static_cast<int>(cfg.feature_set[i]);
  c.put_vector("config.features", codes);
  c.put_scalar("config.ubm_components", cfg.ubm_components);
  c.put_scalar("config.tv_rank", cfg.tv_rank);
  c.put_scalar("config.classifier", static_cast<int>(cfg.classifier));
  c.put_vector("ivector_mean", mean);
  c.Write(path);
}

PipelineConfig LoadBackend(const std::string &path, VectorXd *mean) {
  ModelContainer c = ModelContainer::Read(
      path, AllowNames({"config.features", "config.ubm_components", "config.tv_rank",
                        "config.classifier", "ivector_mean"}));
  PipelineConfig cfg;
  cfg.feature_set.clear();
  VectorXd codes = c.vector("config.features");
  for (Eigen::Index i = 0; i < codes.size(); ++i) {
    int code = static_cast<int>(codes(i));
    if (code < 0 || code > 3) throw Error(path + ": bad feature code");
    cfg.feature_set.push_back(static_cast<FeatureType>(code));
  }
  cfg.ubm_components = static_cast<int>(c.scalar("config.ubm_components"));
  cfg.tv_rank = static_cast<int>(c.scalar("config.tv_rank"));
  cfg.classifier = static_cast<ClassifierKind>(static_cast<int>(c.scalar("config.classifier")));
  *mean = c.vector("ivector_mean");
  return cfg;
}

std::uint64_t StageSeed(std::uint64_t seed, int stage, int feature) {
  // splitmix64 finalizer over a stage-specific offset
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (std::uint64_t(stage) * 16 + feature + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum Stage { kStagePca = 1, kStageUbm, kStageTv, kStageRbm, kStageClassifier };

// Keeps at most `cap` rows, drawn uniformly over all utterances with a
// seeded generator; rows keep their utterance order.
RowMatrixXd PoolRows(const std::vector<Eigen::Index> &counts, std::size_t cap,
                     std::uint64_t seed, int jobs,
                     const std::function<RowMatrixXd(std::size_t)> &rows_of) {
  const std::size_t num_utts = counts.size();
  std::vector<Eigen::Index> offsets(num_utts + 1, 0);
  for (std::size_t u = 0; u < num_utts; ++u) offsets[u + 1] = offsets[u] + counts[u];
  const std::size_t total = static_cast<std::size_t>(offsets.back());

  std::vector<std::vector<Eigen::Index>> keep(num_utts);
  if (total > cap) {
    std::vector<std::size_t> idx(total);
    std::iota(idx.begin(), idx.end(), std::size_t(0));
    Rng rng(seed);
    for (std::size_t i = 0; i < cap; ++i) std::swap(idx[i], idx[i + rng.Index(total - i)]);
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
    std::size_t u = 0;
    for (std::size_t g : idx) {
      while (static_cast<Eigen::Index>(g) >= offsets[u + 1]) ++u;
      keep[u].push_back(static_cast<Eigen::Index>(g) - offsets[u]);
    }
  } else {
    for (std::size_t u = 0; u < num_utts; ++u) {
      keep[u].resize(counts[u]);
      std::iota(keep[u].begin(), keep[u].end(), Eigen::Index(0));
    }
  }

  std::vector<RowMatrixXd> parts(num_utts);
  ParallelFor(num_utts, jobs, [&](std::size_t u) {
    if (keep[u].empty()) return;
    RowMatrixXd rows = rows_of(u);
    if (rows.rows() != counts[u]) throw Error("frame count changed between passes");
    RowMatrixXd picked(keep[u].size(), rows.cols());
    for (std::size_t i = 0; i < keep[u].size(); ++i)
      picked.row(Eigen::Index(i)) = rows.row(keep[u][i]);
    parts[u] = std::move(picked);
  });
  Eigen::Index num_rows = 0, cols = 0;
  for (const RowMatrixXd &p : parts) {
    num_rows += p.rows();
    if (p.cols() > 0) cols = p.cols();
  }
  RowMatrixXd pooled(num_rows, cols);
  Eigen::Index r = 0;
  for (const RowMatrixXd &p : parts) {
    if (p.rows() == 0) continue;
    pooled.middleRows(r, p.rows()) = p;
    r += p.rows();
  }
  return pooled;
}

}  // namespace

Waveform load_entry(const ManifestEntry &e, const std::string &base_dir) {
  fs::path p(e.path);
  if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
  Waveform w = load_waveform(p.string());
  try {
    CheckWaveform(w);
  } catch (const Error &err) {
    throw Error(e.utt_id + ": " + err.what());
  }
  if (w.samples.size() < kFrameLength)
    throw Error(e.utt_id + ": signal shorter than one 256-sample frame");
  return w;
}

// ---------------------------------------------------------------------------
// Training

TrainSummary cmd_train(const PipelineConfig &cfg, const std::vector<ManifestEntry> &manifest,
                       const std::string &base_dir) {
  if (cfg.models_dir.empty()) throw Error("no model directory given");
  if (cfg.feature_set.empty()) throw Error("feature set must not be empty");
  std::vector<const ManifestEntry *> train;
  bool has_human = false, has_spoof = false;
  for (const ManifestEntry &e : manifest) {
    if (e.partition != Partition::kTrain) continue;
    train.push_back(&e);
    (e.label == Label::kHuman ? has_human : has_spoof) = true;
  }
  if (!has_human || !has_spoof)
    throw Error("train partition must contain both human and spoof utterances");
  fs::create_directories(cfg.models_dir);
  const std::size_t num_utts = train.size();
  LogLine() << "training on " << num_utts << " utterances: " << describe(cfg);

  auto stage = [](const std::string &name, auto &&fn) {
    try {
      return fn();
    } catch (const Error &e) {
      throw Error("stage '" + name + "' failed: " + e.what());
    }
  };
  auto load = [&](std::size_t u) { return load_entry(*train[u], base_dir); };

  TrainSummary summary;
  summary.num_train_utts = num_utts;

  std::vector<Eigen::Index> frame_counts(num_utts);
  stage("load", [&] {
    ParallelFor(num_utts, cfg.jobs, [&](std::size_t u) {
      frame_counts[u] = num_frames_for(load(u).samples.size());
    });
    return 0;
  });

  // Front-end PCA bases.
  FrontEndModels front_end = FrontEndModels::Default();
  stage("front-end", [&] {
    for (FeatureType t : cfg.feature_set) {
      PcaModel *pca = front_end.pca_for(t);
      if (!pca) continue;
      RowMatrixXd pooled = PoolRows(
          frame_counts, cfg.max_pca_frames, StageSeed(cfg.seed, kStagePca, int(t)), cfg.jobs,
          [&](std::size_t u) { return pca_input_frames(t, load(u), front_end); });
      *pca = pca_fit(pooled, kNumStatic);
      LogLine() << feature_name(t) << " PCA fit on " << pooled.rows()
                << " frames, leading eigenvalue " << pca->eigenvalues(0);
    }
    save_front_end(FrontEndFile(cfg.models_dir), front_end);
    return 0;
  });

  // Per-feature UBM, TV model and training i-vectors.
  std::vector<std::vector<IVector>> per_feature(cfg.feature_set.size());
  for (std::size_t fi = 0; fi < cfg.feature_set.size(); ++fi) {
    const FeatureType t = cfg.feature_set[fi];
    const std::string name(feature_name(t));
    std::vector<RowMatrixXd> feats(num_utts);
    stage("features " + name, [&] {
      ParallelFor(num_utts, cfg.jobs, [&](std::size_t u) {
        feats[u] = extract_features(t, load(u), front_end).data;
      });
      return 0;
    });

    DiagonalGmm ubm = stage("ubm " + name, [&] {
      RowMatrixXd pooled =
          PoolRows(frame_counts, cfg.max_ubm_frames, StageSeed(cfg.seed, kStageUbm, int(t)),
                   cfg.jobs, [&](std::size_t u) { return feats[u]; });
      GmmTrainOptions opts;
      opts.iters = cfg.ubm_iters;
      opts.seed = StageSeed(cfg.seed, kStageUbm, int(t));
      GmmTrainResult res = gmm_em_train(pooled, cfg.ubm_components, opts);
      summary.ubm_log_likelihood[name] = res.log_likelihood;
      LogLine() << name << " UBM: " << cfg.ubm_components << " components, "
                << pooled.rows() << " frames, final average log-likelihood "
                << res.log_likelihood.back() / double(pooled.rows());
      save_gmm(UbmFile(cfg.models_dir, t), res.gmm);
      return res.gmm;
    });

    std::vector<BwStats> stats(num_utts);
    ParallelFor(num_utts, cfg.jobs,
                [&](std::size_t u) { stats[u] = collect_bw_stats(ubm, feats[u]); });
    feats.clear();

    TvModel tv = stage("tv " + name, [&] {
      TvTrainOptions opts;
      opts.iters = cfg.tv_iters;
      opts.seed = StageSeed(cfg.seed, kStageTv, int(t));
      opts.jobs = cfg.jobs;
      TvTrainResult res = tv_train(stats, ubm, cfg.tv_rank, opts);
      summary.tv_objective[name] = res.objective;
      save_tv(TvFile(cfg.models_dir, t), res.model);
      return res.model;
    });

    IvectorExtractor extractor(tv);
    per_feature[fi].resize(num_utts);
    ParallelFor(num_utts, cfg.jobs,
                [&](std::size_t u) { per_feature[fi][u] = extractor.Extract(stats[u]); });
  }

  // Fusion, centering, length normalization.
  std::vector<IVector> fused(num_utts);
  for (std::size_t u = 0; u < num_utts; ++u) {
    std::vector<IVector> parts;
    for (const auto &f : per_feature) parts.push_back(f[u]);
    fused[u] = fuse_ivectors(parts);
  }
  const Eigen::Index dim = fused.front().values.size();
  VectorXd mean = VectorXd::Zero(dim);
  for (const IVector &v : fused) mean += v.values;
  mean /= double(num_utts);
  SaveBackend(BackendFile(cfg.models_dir), cfg, mean);

  MatrixXd x(num_utts, dim);
  std::vector<int> y(num_utts);
  for (std::size_t u = 0; u < num_utts; ++u) {
    x.row(Eigen::Index(u)) = postprocess_ivector(fused[u], mean).values.transpose();
    y[u] = train[u]->label == Label::kHuman ? kHumanLabel : kSpoofLabel;
  }

  stage("classifier", [&] {
    if (cfg.classifier == ClassifierKind::kSvm) {
      SvmTrainOptions opts;
      opts.c_param = cfg.svm_c;
      opts.human_weight = cfg.human_weight;
      opts.seed = StageSeed(cfg.seed, kStageClassifier, 0);
      SvmTrainInfo info;
      LinearSvmModel m = svm_train(x, y, opts, &info);
      summary.classifier_objective = info.primal;
      save_svm(ClassifierFile(cfg.models_dir), m);
    } else {
      RbmOptions ropts;
      ropts.layer_dims = cfg.dbn_layers;
      ropts.epochs = cfg.rbm_epochs;
      ropts.learning_rate = cfg.rbm_learning_rate;
      ropts.seed = StageSeed(cfg.seed, kStageRbm, 0);
      RbmPretrainResult pre = rbm_pretrain(x, ropts);
      DbnTrainOptions dopts;
      dopts.epochs = cfg.dbn_epochs;
      dopts.learning_rate = cfg.dbn_learning_rate;
      dopts.human_weight = cfg.human_weight;
      dopts.weight_decay = cfg.dbn_weight_decay;
      dopts.seed = StageSeed(cfg.seed, kStageClassifier, 0);
      DbnModel m = dbn_train(pre.layers, x, y, dopts);
      summary.classifier_objective = dbn_loss(m, x, y, dopts);
      LogLine() << "DBN final training cross-entropy " << summary.classifier_objective;
      save_dbn(ClassifierFile(cfg.models_dir), m);
    }
    return 0;
  });
  return summary;
}

// ---------------------------------------------------------------------------
// Scoring

TrainedSystem load_trained_system(const std::string &models_dir) {
  if (models_dir.empty()) throw Error("no model directory given");
  TrainedSystem sys;
  sys.config = LoadBackend(BackendFile(models_dir), &sys.ivector_mean);
  sys.front_end = load_front_end(FrontEndFile(models_dir));
  Eigen::Index dim = 0;
  for (FeatureType t : sys.config.feature_set) {
    const PcaModel *pca = sys.front_end.pca_for(t);
    if (pca && pca->empty())
      throw Error("model/config mismatch: no PCA model for " + std::string(feature_name(t)));
    DiagonalGmm ubm = load_gmm(UbmFile(models_dir, t));
    if (ubm.num_components() != sys.config.ubm_components || ubm.dim() != kFeatureDim)
      throw Error("model/config mismatch: UBM for " + std::string(feature_name(t)) +
                  " has " + std::to_string(ubm.num_components()) + " components");
    TvModel tv = load_tv(TvFile(models_dir, t), ubm);
    if (tv.rank() != sys.config.tv_rank)
      throw Error("model/config mismatch: TV rank for " + std::string(feature_name(t)));
    dim += tv.rank();
    sys.tv.push_back(std::move(tv));
  }
  if (sys.ivector_mean.size() != dim)
    throw Error("model/config mismatch: i-vector mean has dim " +
                std::to_string(sys.ivector_mean.size()) + ", expected " + std::to_string(dim));
  if (sys.config.classifier == ClassifierKind::kSvm) {
    sys.svm = load_svm(ClassifierFile(models_dir));
    if (sys.svm->weights.size() != dim) throw Error("model/config mismatch: SVM dim");
  } else {
    sys.dbn = load_dbn(ClassifierFile(models_dir));
    if (sys.dbn->input_dim() != dim) throw Error("model/config mismatch: DBN input dim");
  }
  return sys;
}

void check_config_matches(const PipelineConfig &cfg, const TrainedSystem &sys) {
  const PipelineConfig &m = sys.config;
  if (cfg.feature_set != m.feature_set || cfg.ubm_components != m.ubm_components ||
      cfg.tv_rank != m.tv_rank || cfg.classifier != m.classifier)
    throw Error("model/config mismatch: requested [" + describe(cfg) +
                "] but models were trained with [" + describe(m) + "]");
}

IVector utterance_ivector(const TrainedSystem &sys, const Waveform &w) {
  std::vector<IVector> parts;
  for (std::size_t i = 0; i < sys.tv.size(); ++i) {
    FeatureMatrix fm = extract_features(sys.config.feature_set[i], w, sys.front_end);
    BwStats stats = collect_bw_stats(sys.tv[i].ubm, fm.data);
    parts.push_back(extract_ivector(sys.tv[i], stats));
  }
  return postprocess_ivector(fuse_ivectors(parts), sys.ivector_mean);
}

namespace {

// Same as utterance_ivector but with cached extractors.
struct Scorer {
  explicit Scorer(const TrainedSystem &s) : sys(s) {
    for (const TvModel &tv : s.tv) extractors.emplace_back(tv);
  }

  IVector Ivector(const Waveform &w) const {
    std::vector<IVector> parts;
    for (std::size_t i = 0; i < sys.tv.size(); ++i) {
      FeatureMatrix fm = extract_features(sys.config.feature_set[i], w, sys.front_end);
      parts.push_back(extractors[i].Extract(collect_bw_stats(sys.tv[i].ubm, fm.data)));
    }
    return postprocess_ivector(fuse_ivectors(parts), sys.ivector_mean);
  }

  double Score(const PipelineConfig &cfg, const Waveform &w) const {
    if (cfg.predetector && predetect_zero_run(w, cfg.predetector_min_run))
      return kPredetectorScore;
    IVector iv = Ivector(w);
    return sys.svm ? svm_score(*sys.svm, iv.values) : dbn_score(*sys.dbn, iv.values);
  }

  const TrainedSystem &sys;
  std::vector<IvectorExtractor> extractors;
};

bool InPartitions(const PipelineConfig &cfg, Partition p) {
  return std::find(cfg.partitions.begin(), cfg.partitions.end(), p) != cfg.partitions.end();
}

}  // namespace

double score_waveform(const PipelineConfig &cfg, const TrainedSystem &sys, const Waveform &w) {
  return Scorer(sys).Score(cfg, w);
}

std::vector<Score> cmd_score(const PipelineConfig &cfg, const std::vector<ManifestEntry> &manifest,
                             const std::string &base_dir) {
  TrainedSystem sys = load_trained_system(cfg.models_dir);
  check_config_matches(cfg, sys);
  Scorer scorer(sys);
  std::vector<const ManifestEntry *> todo;
  for (const ManifestEntry &e : manifest)
    if (InPartitions(cfg, e.partition)) todo.push_back(&e);
  std::sort(todo.begin(), todo.end(), [](const ManifestEntry *a, const ManifestEntry *b) {
    return a->utt_id < b->utt_id;
  });
  std::vector<Score> scores(todo.size());
  ParallelFor(todo.size(), cfg.jobs, [&](std::size_t i) {
    Waveform w = load_entry(*todo[i], base_dir);
    double value;
    try {
      value = scorer.Score(cfg, w);
    } catch (const Error &e) {
      throw Error(todo[i]->utt_id + ": " + e.what());
    }
    scores[i] = Score{todo[i]->utt_id, value};
  });
  std::size_t predetected = 0;
  for (const Score &s : scores) predetected += s.value == kPredetectorScore;
  LogLine() << "scored " << scores.size() << " utterances, " << predetected
            << " flagged by the pre-detector";
  return scores;
}

EvalReport cmd_eval(const std::vector<Score> &scores, const std::vector<ManifestEntry> &manifest,
                    const std::string &system_name) {
  EvalReport report;
  report.result = eer_by_attack(scores, manifest);
  std::vector<std::pair<std::string, EerResult>> rows{{system_name, report.result}};
  report.table = format_eer_report(rows);
  report.tsv = format_eer_tsv(rows);
  return report;
}

std::string cmd_project_lda(const PipelineConfig &cfg, const std::vector<ManifestEntry> &manifest,
                            const std::string &base_dir) {
  TrainedSystem sys = load_trained_system(cfg.models_dir);
  check_config_matches(cfg, sys);
  Scorer scorer(sys);
  auto class_of = [](const ManifestEntry &e) {
    return e.label == Label::kHuman ? std::string("human") : attack_name(e.attack);
  };
  auto ivectors = [&](const std::vector<const ManifestEntry *> &entries) {
    RowMatrixXd x(entries.size(), sys.ivector_mean.size());
    ParallelFor(entries.size(), cfg.jobs, [&](std::size_t i) {
      x.row(Eigen::Index(i)) = scorer.Ivector(load_entry(*entries[i], base_dir)).values.transpose();
    });
    return x;
  };

  std::vector<const ManifestEntry *> fit_set, out_set;
  for (const ManifestEntry &e : manifest) {
    if (e.partition == Partition::kTrain) fit_set.push_back(&e);
    if (InPartitions(cfg, e.partition)) out_set.push_back(&e);
  }
  std::sort(out_set.begin(), out_set.end(), [](const ManifestEntry *a, const ManifestEntry *b) {
    return a->utt_id < b->utt_id;
  });
  std::vector<std::string> fit_classes;
  for (const ManifestEntry *e : fit_set) fit_classes.push_back(class_of(*e));
  LdaModel lda = lda_fit(ivectors(fit_set), fit_classes, 3);
  RowMatrixXd projected = lda_project(lda, ivectors(out_set));

  std::ostringstream os;
  char buf[64];
  for (std::size_t i = 0; i < out_set.size(); ++i) {
    os << out_set[i]->utt_id << '\t' << class_of(*out_set[i]);
    for (Eigen::Index j = 0; j < projected.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.6f", projected(Eigen::Index(i), j));
      os << '\t' << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace antispoof
