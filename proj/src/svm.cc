// antispoof/svm.cc

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

#include "antispoof/svm.h"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace antispoof {

void CheckBinaryTrainingSet(const Eigen::Ref<const MatrixXd> &x, std::span<const int> y) {
  if (x.rows() < 2) throw Error("classifier training needs at least 2 samples");
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw Error("label count does not match sample count");
  if (!x.allFinite()) throw Error("non-finite classifier training features");
  bool has_human = false, has_spoof = false;
  for (int label : y) {
    if (label == kHumanLabel) has_human = true;
    else if (label == kSpoofLabel) has_spoof = true;
    else throw Error("labels must be +1 (human) or -1 (spoof)");
  }
  if (!has_human || !has_spoof)
    throw Error("classifier training data contains a single class");
}

namespace {

double UpperBound(int label, const SvmTrainOptions &opts) {
  return label == kHumanLabel ? opts.c_param * opts.human_weight : opts.c_param;
}

}  // namespace

double svm_primal_objective(const LinearSvmModel &m, const Eigen::Ref<const MatrixXd> &x,
                            std::span<const int> y, const SvmTrainOptions &opts) {
  double obj = 0.5 * (m.weights.squaredNorm() + m.bias * m.bias);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double margin = y[i] * (x.row(i).dot(m.weights) + m.bias);
    obj += UpperBound(y[i], opts) * std::max(0.0, 1.0 - margin);
  }
  return obj;
}

LinearSvmModel svm_train(const Eigen::Ref<const MatrixXd> &x, std::span<const int> y,
                         const SvmTrainOptions &opts, SvmTrainInfo *info) {
  CheckBinaryTrainingSet(x, y);
  if (!(opts.c_param > 0.0)) throw Error("SVM c_param must be positive");
  const Eigen::Index n = x.rows(), dim = x.cols();

  // Augmented weight vector: [w; b].
  VectorXd w = VectorXd::Zero(dim + 1);
  VectorXd alpha = VectorXd::Zero(n);
  VectorXd q_diag(n), upper(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    q_diag(i) = x.row(i).squaredNorm() + 1.0;
    upper(i) = UpperBound(y[i], opts);
  }
  auto dot_aug = [&](Eigen::Index i) { return x.row(i).dot(w.head(dim)) + w(dim); };

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  Rng rng(opts.seed);

  LinearSvmModel model;
  model.c_param = opts.c_param;
  double primal = 0.0, dual = 0.0;
  int epoch = 0;
  for (; epoch < opts.max_epochs;) {
    rng.Shuffle(order);
    for (Eigen::Index i : order) {
      double g = y[i] * dot_aug(i) - 1.0;
      double pg = g;
      if (alpha(i) <= 0.0) pg = std::min(g, 0.0);
      else if (alpha(i) >= upper(i)) pg = std::max(g, 0.0);
      if (pg == 0.0) continue;
      double old = alpha(i);
      alpha(i) = std::clamp(old - g / q_diag(i), 0.0, upper(i));
      double delta = (alpha(i) - old) * y[i];
      w.head(dim) += delta * x.row(i).transpose();
      w(dim) += delta;
    }
    ++epoch;

    double hinge = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      hinge += upper(i) * std::max(0.0, 1.0 - y[i] * dot_aug(i));
    primal = 0.5 * w.squaredNorm() + hinge;
    dual = alpha.sum() - 0.5 * w.squaredNorm();
    if (primal - dual < opts.gap_tolerance * double(n)) break;
  }
  model.weights = w.head(dim);
  model.bias = w(dim);
  if (info) *info = SvmTrainInfo{epoch, primal, dual};
  LogLine() << "SVM trained in " << epoch << " epochs, primal " << primal
            << ", duality gap " << primal - dual;
  return model;
}

double svm_score(const LinearSvmModel &m, const Eigen::Ref<const VectorXd> &x) {
  if (x.size() != m.weights.size())
    throw Error("SVM input dim " + std::to_string(x.size()) + " != model dim " +
                std::to_string(m.weights.size()));
  return m.weights.dot(x) + m.bias;
}

}  // namespace antispoof
