// antispoof/features.h

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

#ifndef ANTISPOOF_FEATURES_H_
#define ANTISPOOF_FEATURES_H_

#include <optional>
#include <string>
#include <string_view>

#include "antispoof/signal.h"
#include "antispoof/transforms.h"

namespace antispoof {

enum class FeatureType { kMfcc = 0, kMfpc = 1, kCosPhasePc = 2, kMwpc = 3 };

inline constexpr int kNumStatic = 12;
inline constexpr int kFeatureDim = 3 * kNumStatic;
inline constexpr int kNumMelFilters = 24;
inline constexpr double kLogFloor = 1e-10;

std::string_view feature_name(FeatureType t);
/// Case-insensitive; nullopt for unknown names.
std::optional<FeatureType> parse_feature_type(std::string_view name);

/// Frames x 36: 12 statics, 12 deltas, 12 delta-deltas.
struct FeatureMatrix {
  FeatureType type = FeatureType::kMfcc;
  RowMatrixXd data;
  std::string utt_id;
};

/// Everything the extractors need besides the waveform. The PCA bases are
/// fit on training data beforehand; the filterbank and the wavelet tree are
/// fixed constructions.
struct FrontEndModels {
  MelFilterbank mel_fb;
  PcaModel pca_mfpc;      // 24 -> 12
  PcaModel pca_cosphase;  // 129 -> 12
  PcaModel pca_mwpc;      // 24 -> 12
  WaveletPacketTree wpt;
  MatrixXd leaf_pooling;  // 24 x 64, mel triangles at leaf centers

  /// Filterbank, tree and pooling built; PCA models empty.
  static FrontEndModels Default();

  /// The PCA model a feature type consumes, or nullptr for MFCC.
  const PcaModel *pca_for(FeatureType t) const;
  PcaModel *pca_for(FeatureType t);
};

/// Triangle weights of each mel filter at the leaf center frequencies
/// (b + 0.5) * f_max / num_leaves.
MatrixXd mel_leaf_pooling(const MelFilterbank &fb, int num_leaves);

/// log(max(x, 1e-10)), elementwise.
template <typename Derived>
auto floored_log(const Eigen::MatrixBase<Derived> &x) {
  return x.derived().array().max(typename Derived::Scalar(kLogFloor)).log().matrix();
}

// Per-frame vectors that sit right before the decorrelating transform.

/// F x 24 log mel filterbank energies.
RowMatrixXd log_mel_frames(const Waveform &w, const MelFilterbank &fb);
/// F x 129 cosine of the unwrapped phase spectrum.
RowMatrixXd cos_phase_frames(const Waveform &w);
/// Cosine of the frequency-unwrapped version of a wrapped phase matrix.
RowMatrixXd cos_unwrapped(const Eigen::Ref<const RowMatrixXd> &wrapped_phase);
/// F x 24 log of mel-pooled per-leaf Teager-Kaiser energy means.
RowMatrixXd mwpc_log_bands(const Waveform &w, const FrontEndModels &models);
/// F x 64 per-leaf TKE means in ascending frequency order.
RowMatrixXd leaf_tke_means(const FrameSet &fs, const WaveletPacketTree &tree);

/// The PCA input for a PCA-based feature type; throws for MFCC.
RowMatrixXd pca_input_frames(FeatureType t, const Waveform &w,
                             const FrontEndModels &models);

/// Appends +-2 frame regression deltas and delta-deltas with edge
/// replication: [static | delta | delta-delta].
RowMatrixXd add_deltas(const Eigen::Ref<const RowMatrixXd> &statics);

FeatureMatrix extract_mfcc(const Waveform &w, const FrontEndModels &models);
FeatureMatrix extract_mfpc(const Waveform &w, const FrontEndModels &models);
FeatureMatrix extract_cosphasepc(const Waveform &w, const FrontEndModels &models);
FeatureMatrix extract_mwpc(const Waveform &w, const FrontEndModels &models);

FeatureMatrix extract_features(FeatureType t, const Waveform &w,
                               const FrontEndModels &models);

}  // namespace antispoof

#endif  // ANTISPOOF_FEATURES_H_
