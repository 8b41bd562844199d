// antispoof/ivector.h

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

#ifndef ANTISPOOF_IVECTOR_H_
#define ANTISPOOF_IVECTOR_H_

#include <cstdint>
#include <vector>

#include "antispoof/gmm.h"

namespace antispoof {

/// Baum-Welch statistics of one utterance. First-order sums are left
/// uncentered so stats of concatenated utterances simply add.
struct BwStats {
  VectorXd n;  // C soft counts
  MatrixXd f;  // C x d posterior-weighted frame sums

  BwStats &operator+=(const BwStats &other);
};

BwStats operator+(BwStats a, const BwStats &b);

BwStats collect_bw_stats(const DiagonalGmm &g,
                         const Eigen::Ref<const RowMatrixXd> &feats);

/// Total-variability model: supervector mean from the UBM plus the low-rank
/// matrix T. Rows [c d, (c + 1) d) of t_matrix form component c's block.
struct TvModel {
  MatrixXd t_matrix;  // (C d) x R
  DiagonalGmm ubm;

  Eigen::Index rank() const { return t_matrix.cols(); }
  auto block(Eigen::Index c) const {
    return t_matrix.middleRows(c * ubm.dim(), ubm.dim());
  }
};

struct IVector {
  VectorXd values;
  bool normalized = false;
};

/// Precomputes the per-component quantities i-vector extraction reuses.
/// Instances are immutable and may be shared between threads.
class IvectorExtractor {
 public:
  explicit IvectorExtractor(const TvModel &tv);

  const TvModel &model() const { return tv_; }

  /// Posterior precision L = I + sum_c n_c T_c' S_c^-1 T_c.
  MatrixXd Precision(const VectorXd &n) const;
  /// Linear term b = sum_c T_c' S_c^-1 (f_c - n_c m_c).
  VectorXd Linear(const BwStats &stats) const;
  /// Posterior mean L^-1 b; optionally also returns L^-1.
  IVector Extract(const BwStats &stats, MatrixXd *covariance = nullptr) const;

 private:
  void CheckStats(const BwStats &stats) const;

  TvModel tv_;
  MatrixXd t_scaled_;               // S^-1 T, (C d) x R
  std::vector<MatrixXd> t_var_t_;   // per component T_c' S_c^-1 T_c (may be empty)
};

IVector extract_ivector(const TvModel &tv, const BwStats &stats);

struct TvTrainOptions {
  int iters = 5;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct TvTrainResult {
  TvModel model;
  /// Sum over utterances of 0.5 b'L^-1 b - 0.5 log det L, the T-dependent
  /// part of the marginal log-likelihood; one entry per E-step (iters + 1).
  std::vector<double> objective;
};

/// EM for T with the UBM held fixed. T starts uniform in [-0.1, 0.1].
TvTrainResult tv_train(const std::vector<BwStats> &stats, const DiagonalGmm &ubm,
                       int rank, const TvTrainOptions &opts);

/// Centers with `training_mean` and scales to unit length.
IVector postprocess_ivector(const IVector &v, const VectorXd &training_mean);

/// Concatenates per-feature i-vectors in the given order.
IVector fuse_ivectors(const std::vector<IVector> &parts);

}  // namespace antispoof

#endif  // ANTISPOOF_IVECTOR_H_
