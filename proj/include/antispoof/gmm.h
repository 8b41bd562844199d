// antispoof/gmm.h

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

#ifndef ANTISPOOF_GMM_H_
#define ANTISPOOF_GMM_H_

#include <cstdint>
#include <vector>

#include "antispoof/common.h"

namespace antispoof {

/// Diagonal-covariance Gaussian mixture; the universal background model.
struct DiagonalGmm {
  VectorXd weights;    // C, sums to 1
  MatrixXd means;      // C x d
  MatrixXd variances;  // C x d, strictly positive

  Eigen::Index num_components() const { return weights.size(); }
  Eigen::Index dim() const { return means.cols(); }
};

/// Throws Error if shapes disagree, weights do not sum to 1 or a variance
/// is not positive.
void CheckGmm(const DiagonalGmm &g);

/// N x C matrix of log(w_c) + log N(x_n; mu_c, diag(var_c)).
MatrixXd component_log_likelihoods(const DiagonalGmm &g,
                                   const Eigen::Ref<const RowMatrixXd> &frames);

/// Posterior responsibilities of one frame, computed in the log domain.
VectorXd gmm_posteriors(const DiagonalGmm &g, const Eigen::Ref<const VectorXd> &frame);

/// Row-normalized posteriors for many frames. If `total_log_like` is given
/// it receives sum_n log p(x_n).
MatrixXd gmm_posteriors(const DiagonalGmm &g,
                        const Eigen::Ref<const RowMatrixXd> &frames,
                        double *total_log_like);

struct GmmTrainOptions {
  int iters = 10;
  std::uint64_t seed = 0;
  /// Variances are floored at this fraction of the global per-dim variance.
  double var_floor_factor = 1e-3;
};

struct GmmTrainResult {
  DiagonalGmm gmm;
  /// Total data log-likelihood before each EM step and after the last one
  /// (iters + 1 entries).
  std::vector<double> log_likelihood;
};

/// Seeded k-means++ selection of the initial means, global variance and
/// uniform weights, then `iters` EM steps. Needs N >= 10 C frames.
GmmTrainResult gmm_em_train(const Eigen::Ref<const RowMatrixXd> &frames,
                            int num_components, const GmmTrainOptions &opts);

}  // namespace antispoof

#endif  // ANTISPOOF_GMM_H_
