// antispoof/dbn.cc

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

#include "antispoof/dbn.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace antispoof {

namespace {

MatrixXd Sigmoid(const MatrixXd &a) {
  return (1.0 + (-a.array()).exp()).inverse().matrix();
}

// Columns are samples.
MatrixXd Affine(const DenseLayer &l, const MatrixXd &in) {
  MatrixXd out = l.weights * in;
  out.colwise() += l.bias;
  return out;
}

MatrixXd RandomWeights(Eigen::Index rows, Eigen::Index cols, double stddev, Rng *rng) {
  MatrixXd w(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) w(i, j) = stddev * rng->Normal();
  return w;
}

// Rows of x as columns, in the order given.
MatrixXd GatherColumns(const Eigen::Ref<const MatrixXd> &x,
                       const std::vector<Eigen::Index> &order, std::size_t begin,
                       std::size_t end) {
  MatrixXd out(x.cols(), static_cast<Eigen::Index>(end - begin));
  for (std::size_t i = begin; i < end; ++i)
    out.col(static_cast<Eigen::Index>(i - begin)) = x.row(order[i]).transpose();
  return out;
}

void TrainRbm(const MatrixXd &data, RbmLayer *rbm, const RbmOptions &opts, Rng *rng,
              std::vector<double> *errors) {
  const Eigen::Index n = data.rows();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  const std::size_t batch = static_cast<std::size_t>(std::max(1, opts.batch_size));
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    rng->Shuffle(order);
    double err = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      std::size_t end = std::min(order.size(), start + batch);
      MatrixXd v0 = GatherColumns(data, order, start, end);
      const double bsz = double(v0.cols());
      MatrixXd h0 = rbm->weights * v0;
      h0.colwise() += rbm->hidden_bias;
      h0 = Sigmoid(h0);
      MatrixXd h0_sample(h0.rows(), h0.cols());
      for (Eigen::Index j = 0; j < h0.cols(); ++j)
        for (Eigen::Index i = 0; i < h0.rows(); ++i)
          h0_sample(i, j) = rng->Uniform() < h0(i, j) ? 1.0 : 0.0;
      MatrixXd v1 = rbm->weights.transpose() * h0_sample;
      v1.colwise() += rbm->visible_bias;
      if (!rbm->gaussian_visible) v1 = Sigmoid(v1);
      MatrixXd h1 = rbm->weights * v1;
      h1.colwise() += rbm->hidden_bias;
      h1 = Sigmoid(h1);

      double step = opts.learning_rate / bsz;
      rbm->weights += step * (h0 * v0.transpose() - h1 * v1.transpose());
      rbm->hidden_bias += step * (h0 - h1).rowwise().sum();
      rbm->visible_bias += step * (v0 - v1).rowwise().sum();
      err += (v0 - v1).squaredNorm();
    }
    double mse = err / (double(n) * double(data.cols()));
    if (!std::isfinite(mse)) throw Error("RBM pretraining diverged");
    errors->push_back(mse);
  }
}

}  // namespace

RbmPretrainResult rbm_pretrain(const Eigen::Ref<const MatrixXd> &x, const RbmOptions &opts) {
  if (opts.layer_dims.empty()) throw Error("DBN needs at least one hidden layer");
  if (x.rows() < 1) throw Error("RBM pretraining needs data");
  if (!x.allFinite()) throw Error("non-finite RBM training input");
  Rng rng(opts.seed);
  RbmPretrainResult result;
  MatrixXd input = x;
  for (std::size_t k = 0; k < opts.layer_dims.size(); ++k) {
    const int hidden = opts.layer_dims[k];
    if (hidden < 1) throw Error("DBN layer sizes must be positive");
    RbmLayer rbm;
    rbm.gaussian_visible = k == 0;
    rbm.weights = RandomWeights(hidden, input.cols(), 0.01, &rng);
    rbm.hidden_bias = VectorXd::Zero(hidden);
    rbm.visible_bias = VectorXd::Zero(input.cols());
    result.reconstruction_error.emplace_back();
    TrainRbm(input, &rbm, opts, &rng, &result.reconstruction_error.back());
    MatrixXd act = input * rbm.weights.transpose();
    act.rowwise() += rbm.hidden_bias.transpose();
    input = Sigmoid(act);
    LogLine() << "RBM layer " << k << " (" << rbm.weights.cols() << " -> " << hidden
              << ") pretrained";
    result.layers.push_back(std::move(rbm));
  }
  return result;
}

void CheckDbn(const DbnModel &m) {
  Eigen::Index dim = m.input_dim();
  for (const DenseLayer &l : m.hidden) {
    if (l.in_dim() != dim || l.bias.size() != l.out_dim())
      throw Error("DBN layer dimensions do not chain");
    dim = l.out_dim();
  }
  if (m.head.in_dim() != dim || m.head.out_dim() != 2 || m.head.bias.size() != 2)
    throw Error("DBN softmax head must map the last hidden layer to 2 outputs");
}

double dbn_loss(const DbnModel &m, const Eigen::Ref<const MatrixXd> &x,
                std::span<const int> y, const DbnTrainOptions &opts, DbnModel *grad) {
  if (x.cols() != m.input_dim()) throw Error("DBN input dimension mismatch");
  const Eigen::Index n = x.rows();
  std::vector<MatrixXd> acts{x.transpose()};
  for (const DenseLayer &l : m.hidden) acts.push_back(Sigmoid(Affine(l, acts.back())));
  MatrixXd logits = Affine(m.head, acts.back());

  MatrixXd delta(2, n);
  double loss = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double mx = logits.col(j).maxCoeff();
    double lse = mx + std::log((logits.col(j).array() - mx).exp().sum());
    int target = y[j] == kHumanLabel ? 1 : 0;
    double weight = y[j] == kHumanLabel ? opts.human_weight : 1.0;
    loss -= weight * (logits(target, j) - lse);
    delta.col(j) = (logits.col(j).array() - lse).exp().matrix();
    delta(target, j) -= 1.0;
    delta.col(j) *= weight / double(n);
  }
  loss /= double(n);
  if (opts.weight_decay > 0.0) {
    double sq = m.head.weights.squaredNorm();
    for (const DenseLayer &l : m.hidden) sq += l.weights.squaredNorm();
    loss += 0.5 * opts.weight_decay * sq;
  }
  if (!grad) return loss;

  grad->hidden.resize(m.hidden.size());
  grad->head.weights = delta * acts.back().transpose() + opts.weight_decay * m.head.weights;
  grad->head.bias = delta.rowwise().sum();
  MatrixXd back = m.head.weights.transpose() * delta;
  for (std::size_t k = m.hidden.size(); k-- > 0;) {
    const MatrixXd &a = acts[k + 1];
    MatrixXd pre = back.cwiseProduct(a.cwiseProduct((1.0 - a.array()).matrix()));
    grad->hidden[k].weights =
        pre * acts[k].transpose() + opts.weight_decay * m.hidden[k].weights;
    grad->hidden[k].bias = pre.rowwise().sum();
    if (k > 0) back = m.hidden[k].weights.transpose() * pre;
  }
  return loss;
}

DbnModel dbn_train(const std::vector<RbmLayer> &pretrained,
                   const Eigen::Ref<const MatrixXd> &x, std::span<const int> y,
                   const DbnTrainOptions &opts) {
  CheckBinaryTrainingSet(x, y);
  DbnModel m;
  for (const RbmLayer &r : pretrained) m.hidden.push_back({r.weights, r.hidden_bias});
  if (!m.hidden.empty() && m.hidden.front().in_dim() != x.cols())
    throw Error("pretrained DBN input dim " + std::to_string(m.hidden.front().in_dim()) +
                " != data dim " + std::to_string(x.cols()));
  Rng rng(opts.seed);
  Eigen::Index last = m.hidden.empty() ? x.cols() : m.hidden.back().out_dim();
  m.head.weights = RandomWeights(2, last, 0.01, &rng);
  m.head.bias = VectorXd::Zero(2);
  CheckDbn(m);

  const Eigen::Index n = x.rows();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  const std::size_t batch = static_cast<std::size_t>(std::max(1, opts.batch_size));
  DbnModel grad;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    rng.Shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      std::size_t end = std::min(order.size(), start + batch);
      MatrixXd xb = GatherColumns(x, order, start, end).transpose();
      std::vector<int> yb;
      for (std::size_t i = start; i < end; ++i) yb.push_back(y[order[i]]);
      epoch_loss += dbn_loss(m, xb, yb, opts, &grad) * double(end - start);
      m.head.weights -= opts.learning_rate * grad.head.weights;
      m.head.bias -= opts.learning_rate * grad.head.bias;
      for (std::size_t k = 0; k < m.hidden.size(); ++k) {
        m.hidden[k].weights -= opts.learning_rate * grad.hidden[k].weights;
        m.hidden[k].bias -= opts.learning_rate * grad.hidden[k].bias;
      }
    }
    if (!std::isfinite(epoch_loss)) throw Error("DBN fine-tuning diverged");
    if (epoch + 1 == opts.epochs || epoch % 10 == 0)
      LogLine() << "DBN epoch " << epoch << ": cross-entropy " << epoch_loss / double(n);
  }
  return m;
}

namespace {

Eigen::Vector2d Logits(const DbnModel &m, const Eigen::Ref<const VectorXd> &x) {
  if (x.size() != m.input_dim())
    throw Error("DBN input dim " + std::to_string(x.size()) + " != model dim " +
                std::to_string(m.input_dim()));
  VectorXd a = x;
  for (const DenseLayer &l : m.hidden) a = Sigmoid(l.weights * a + l.bias);
  return m.head.weights * a + m.head.bias;
}

}  // namespace

Eigen::Vector2d dbn_posteriors(const DbnModel &m, const Eigen::Ref<const VectorXd> &x) {
  Eigen::Vector2d z = Logits(m, x);
  Eigen::Vector2d p = (z.array() - z.maxCoeff()).exp();
  return p / p.sum();
}

double dbn_score(const DbnModel &m, const Eigen::Ref<const VectorXd> &x) {
  Eigen::Vector2d z = Logits(m, x);
  return z(1) - z(0);
}

}  // namespace antispoof
