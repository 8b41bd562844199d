// antispoof/svm.h

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

#ifndef ANTISPOOF_SVM_H_
#define ANTISPOOF_SVM_H_

#include <cstdint>
#include <span>

#include "antispoof/common.h"

namespace antispoof {

/// Class labels shared by both classifiers.
inline constexpr int kHumanLabel = +1;
inline constexpr int kSpoofLabel = -1;

/// Throws unless x is finite, labels are +-1, sizes agree and both classes
/// are present.
void CheckBinaryTrainingSet(const Eigen::Ref<const MatrixXd> &x, std::span<const int> y);

struct LinearSvmModel {
  VectorXd weights;
  double bias = 0.0;
  double c_param = 1.0;
};

struct SvmTrainOptions {
  double c_param = 1.0;
  /// Multiplies c_param for human-labelled samples.
  double human_weight = 1.0;
  /// Stop once primal - dual < gap_tolerance * N.
  double gap_tolerance = 1e-6;
  int max_epochs = 1000;
  std::uint64_t seed = 0;
};

struct SvmTrainInfo {
  int epochs = 0;
  double primal = 0.0;
  double dual = 0.0;
};

/// L2-regularized hinge-loss linear SVM trained by dual coordinate descent.
/// The bias is learned as the weight of an appended constant-1 feature, so
/// it is regularized with the rest of w.
LinearSvmModel svm_train(const Eigen::Ref<const MatrixXd> &x, std::span<const int> y,
                         const SvmTrainOptions &opts, SvmTrainInfo *info = nullptr);

/// 0.5 |[w; b]|^2 + sum_i C_i max(0, 1 - y_i (w.x_i + b)).
double svm_primal_objective(const LinearSvmModel &m, const Eigen::Ref<const MatrixXd> &x,
                            std::span<const int> y, const SvmTrainOptions &opts);

/// w.x + b; higher means more human-like.
double svm_score(const LinearSvmModel &m, const Eigen::Ref<const VectorXd> &x);

}  // namespace antispoof

#endif  // ANTISPOOF_SVM_H_
