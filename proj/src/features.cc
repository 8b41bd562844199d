// antispoof/features.cc

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

#include "antispoof/features.h"

#include <algorithm>
#include <cctype>
#include <utility>

namespace antispoof {

std::string_view feature_name(FeatureType t) {
  switch (t) {
    case FeatureType::kMfcc: return "MFCC";
    case FeatureType::kMfpc: return "MFPC";
    case FeatureType::kCosPhasePc: return "CosPhasePC";
    case FeatureType::kMwpc: return "MWPC";
  }
  return "?";
}

std::optional<FeatureType> parse_feature_type(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "mfcc") return FeatureType::kMfcc;
  if (lower == "mfpc") return FeatureType::kMfpc;
  if (lower == "cosphasepc") return FeatureType::kCosPhasePc;
  if (lower == "mwpc") return FeatureType::kMwpc;
  return std::nullopt;
}

FrontEndModels FrontEndModels::Default() {
  FrontEndModels m;
  m.mel_fb = build_mel_filterbank(kNumMelFilters, kNumBins, kSampleRate / 2.0);
  m.wpt = make_wavelet_packet_tree(6);
  m.leaf_pooling = mel_leaf_pooling(m.mel_fb, m.wpt.num_leaves());
  return m;
}

const PcaModel *FrontEndModels::pca_for(FeatureType t) const {
  switch (t) {
    case FeatureType::kMfpc: return &pca_mfpc;
    case FeatureType::kCosPhasePc: return &pca_cosphase;
    case FeatureType::kMwpc: return &pca_mwpc;
    case FeatureType::kMfcc: break;
  }
  return nullptr;
}

PcaModel *FrontEndModels::pca_for(FeatureType t) {
  return const_cast<PcaModel *>(std::as_const(*this).pca_for(t));
}

MatrixXd mel_leaf_pooling(const MelFilterbank &fb, int num_leaves) {
  MatrixXd pool(fb.n_filters, num_leaves);
  double leaf_hz = fb.f_max / num_leaves;
  for (int i = 0; i < fb.n_filters; ++i)
    for (int b = 0; b < num_leaves; ++b)
      pool(i, b) = fb.weight_at(i, (b + 0.5) * leaf_hz);
  return pool;
}

RowMatrixXd log_mel_frames(const Waveform &w, const MelFilterbank &fb) {
  SpectrumFrames spec = spectrum(frame_and_window(w));
  RowMatrixXd energies = spec.power * fb.weights.transpose();
  return floored_log(energies);
}

RowMatrixXd cos_unwrapped(const Eigen::Ref<const RowMatrixXd> &wrapped_phase) {
  RowMatrixXd out(wrapped_phase.rows(), wrapped_phase.cols());
  for (Eigen::Index f = 0; f < wrapped_phase.rows(); ++f)
    out.row(f) =
        unwrap_phase(wrapped_phase.row(f).transpose()).array().cos().transpose();
  return out;
}

RowMatrixXd cos_phase_frames(const Waveform &w) {
  SpectrumFrames spec = spectrum(frame_and_window(w));
  return spec.phase_unwrapped.array().cos().matrix();
}

RowMatrixXd leaf_tke_means(const FrameSet &fs, const WaveletPacketTree &tree) {
  RowMatrixXd means(fs.num_frames(), tree.num_leaves());
  for (Eigen::Index f = 0; f < fs.num_frames(); ++f) {
    RowMatrixXd leaves = wpt_decompose(fs.frames.row(f).transpose(), tree);
    for (Eigen::Index b = 0; b < leaves.rows(); ++b)
      means(f, b) = tke(leaves.row(b)).mean();
  }
  return means;
}

RowMatrixXd mwpc_log_bands(const Waveform &w, const FrontEndModels &models) {
  RowMatrixXd leaf_energy = leaf_tke_means(frame_and_window(w), models.wpt);
  RowMatrixXd pooled = leaf_energy * models.leaf_pooling.transpose();
  return floored_log(pooled);
}

RowMatrixXd pca_input_frames(FeatureType t, const Waveform &w,
                             const FrontEndModels &models) {
  switch (t) {
    case FeatureType::kMfpc: return log_mel_frames(w, models.mel_fb);
    case FeatureType::kCosPhasePc: return cos_phase_frames(w);
    case FeatureType::kMwpc: return mwpc_log_bands(w, models);
    case FeatureType::kMfcc: break;
  }
  throw Error("MFCC has no PCA stage");
}

RowMatrixXd add_deltas(const Eigen::Ref<const RowMatrixXd> &statics) {
  const Eigen::Index num_frames = statics.rows(), dim = statics.cols();
  if (num_frames < 1) throw Error("add_deltas: no frames");
  auto regress = [num_frames](const RowMatrixXd &c) {
    RowMatrixXd d(c.rows(), c.cols());
    auto at = [&](Eigen::Index t) {
      return c.row(std::clamp<Eigen::Index>(t, 0, num_frames - 1));
    };
    for (Eigen::Index t = 0; t < num_frames; ++t)
      d.row(t) = ((at(t + 1) - at(t - 1)) + 2.0 * (at(t + 2) - at(t - 2))) / 10.0;
    return d;
  };
  RowMatrixXd out(num_frames, 3 * dim);
  RowMatrixXd delta = regress(statics);
  out.leftCols(dim) = statics;
  out.middleCols(dim, dim) = delta;
  out.rightCols(dim) = regress(delta);
  return out;
}

namespace {

RowMatrixXd ProjectWith(const PcaModel *pca, FeatureType t,
                        const RowMatrixXd &frames) {
  if (pca == nullptr || pca->empty())
    throw Error(std::string("PCA model for ") + std::string(feature_name(t)) +
                " has not been fit");
  if (pca->input_dim() != frames.cols() || pca->output_dim() != kNumStatic)
    throw Error(std::string("PCA model dimension mismatch for ") +
                std::string(feature_name(t)) + ": model " +
                std::to_string(pca->input_dim()) + "->" +
                std::to_string(pca->output_dim()) + ", frames have " +
                std::to_string(frames.cols()) + " columns");
  return pca_apply_rows(*pca, frames);
}

FeatureMatrix Finish(FeatureType t, const RowMatrixXd &statics) {
  FeatureMatrix fm;
  fm.type = t;
  fm.data = add_deltas(statics);
  return fm;
}

}  // namespace

FeatureMatrix extract_mfcc(const Waveform &w, const FrontEndModels &models) {
  RowMatrixXd log_mel = log_mel_frames(w, models.mel_fb);
  static const MatrixXd dct = dct_matrix<double>(kNumMelFilters);
  RowMatrixXd cepstra = log_mel * dct.transpose();
  // Index 0 (DC) is dropped.
  return Finish(FeatureType::kMfcc, cepstra.middleCols(1, kNumStatic));
}

FeatureMatrix extract_mfpc(const Waveform &w, const FrontEndModels &models) {
  return Finish(FeatureType::kMfpc,
                ProjectWith(&models.pca_mfpc, FeatureType::kMfpc,
                            log_mel_frames(w, models.mel_fb)));
}

FeatureMatrix extract_cosphasepc(const Waveform &w, const FrontEndModels &models) {
  return Finish(FeatureType::kCosPhasePc,
                ProjectWith(&models.pca_cosphase, FeatureType::kCosPhasePc,
                            cos_phase_frames(w)));
}

FeatureMatrix extract_mwpc(const Waveform &w, const FrontEndModels &models) {
  return Finish(FeatureType::kMwpc,
                ProjectWith(&models.pca_mwpc, FeatureType::kMwpc,
                            mwpc_log_bands(w, models)));
}

FeatureMatrix extract_features(FeatureType t, const Waveform &w,
                               const FrontEndModels &models) {
  switch (t) {
    case FeatureType::kMfcc: return extract_mfcc(w, models);
    case FeatureType::kMfpc: return extract_mfpc(w, models);
    case FeatureType::kCosPhasePc: return extract_cosphasepc(w, models);
    case FeatureType::kMwpc: return extract_mwpc(w, models);
  }
  throw Error("unknown feature type");
}

}  // namespace antispoof
