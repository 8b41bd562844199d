// antispoof/dbn.h

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

#ifndef ANTISPOOF_DBN_H_
#define ANTISPOOF_DBN_H_

#include <cstdint>
#include <span>
#include <vector>

#include "antispoof/svm.h"

namespace antispoof {

/// y = W x + b, with W stored output-major (out x in).
struct DenseLayer {
  MatrixXd weights;
  VectorXd bias;

  Eigen::Index in_dim() const { return weights.cols(); }
  Eigen::Index out_dim() const { return weights.rows(); }
};

/// One restricted Boltzmann machine of the pretraining stack.
struct RbmLayer {
  MatrixXd weights;  // hidden x visible
  VectorXd hidden_bias;
  VectorXd visible_bias;
  bool gaussian_visible = false;
};

struct RbmOptions {
  std::vector<int> layer_dims{256, 256};
  int epochs = 10;
  double learning_rate = 0.01;
  int batch_size = 64;
  std::uint64_t seed = 0;
};

struct RbmPretrainResult {
  std::vector<RbmLayer> layers;
  /// Mean squared reconstruction error, per layer and epoch.
  std::vector<std::vector<double>> reconstruction_error;
};

/// Greedy layer-wise CD-1. The first machine has unit-variance Gaussian
/// visible units, the rest are Bernoulli-Bernoulli; each layer is trained on
/// the hidden probabilities of the one below.
RbmPretrainResult rbm_pretrain(const Eigen::Ref<const MatrixXd> &x, const RbmOptions &opts);

/// Sigmoid hidden layers followed by a two-way softmax. Output 0 is spoof,
/// output 1 is human.
struct DbnModel {
  std::vector<DenseLayer> hidden;
  DenseLayer head;

  Eigen::Index input_dim() const {
    return hidden.empty() ? head.in_dim() : hidden.front().in_dim();
  }
};

/// Throws unless consecutive layer dims chain and the head has 2 outputs.
void CheckDbn(const DbnModel &m);

struct DbnTrainOptions {
  int epochs = 100;
  double learning_rate = 0.1;
  int batch_size = 64;
  std::uint64_t seed = 0;
  /// Loss weight of human-labelled samples.
  double human_weight = 1.0;
  /// L2 penalty on weight matrices; off by default.
  double weight_decay = 0.0;
};

/// Mean weighted cross-entropy over the rows of x (plus the weight decay
/// term). Fills `grad`, shaped like the model, when non-null.
double dbn_loss(const DbnModel &m, const Eigen::Ref<const MatrixXd> &x,
                std::span<const int> y, const DbnTrainOptions &opts,
                DbnModel *grad = nullptr);

/// Appends a softmax head to the pretrained stack and fine-tunes the whole
/// network by mini-batch gradient descent with seeded shuffling.
DbnModel dbn_train(const std::vector<RbmLayer> &pretrained,
                   const Eigen::Ref<const MatrixXd> &x, std::span<const int> y,
                   const DbnTrainOptions &opts);

/// Mean-field forward pass: [p(spoof), p(human)].
Eigen::Vector2d dbn_posteriors(const DbnModel &m, const Eigen::Ref<const VectorXd> &x);

/// log p(human | x) - log p(spoof | x).
double dbn_score(const DbnModel &m, const Eigen::Ref<const VectorXd> &x);

}  // namespace antispoof

#endif  // ANTISPOOF_DBN_H_
