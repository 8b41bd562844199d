// antispoof/gmm.cc

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

#include "antispoof/gmm.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace antispoof {

namespace {

// Frames are processed in blocks so the N x C posterior matrix never has to
// exist at once; blocks are reduced in order.
constexpr Eigen::Index kBlockFrames = 4096;

}  // namespace

void CheckGmm(const DiagonalGmm &g) {
  const Eigen::Index c = g.weights.size();
  if (c == 0) throw Error("GMM has no components");
  if (g.means.rows() != c || g.variances.rows() != c ||
      g.variances.cols() != g.means.cols())
    throw Error("GMM parameter shapes disagree");
  if (std::abs(g.weights.sum() - 1.0) > 1e-9)
    throw Error("GMM weights do not sum to 1");
  if ((g.weights.array() < 0).any()) throw Error("GMM has a negative weight");
  if (!(g.variances.array() > 0).all()) throw Error("GMM has a non-positive variance");
}

MatrixXd component_log_likelihoods(const DiagonalGmm &g,
                                   const Eigen::Ref<const RowMatrixXd> &frames) {
  if (frames.cols() != g.dim())
    throw Error("frame dim " + std::to_string(frames.cols()) + " != GMM dim " +
                std::to_string(g.dim()));
  const Eigen::Index c = g.num_components();
  MatrixXd inv_var = g.variances.cwiseInverse();
  MatrixXd mean_inv_var = g.means.cwiseProduct(inv_var);
  VectorXd gconst(c);
  for (Eigen::Index k = 0; k < c; ++k) {
    gconst(k) = std::log(g.weights(k)) -
                0.5 * (g.dim() * std::log(2.0 * std::numbers::pi) +
                       g.variances.row(k).array().log().sum() +
                       g.means.row(k).cwiseProduct(mean_inv_var.row(k)).sum());
  }
  MatrixXd ll = -0.5 * (frames.array().square().matrix() * inv_var.transpose());
  ll.noalias() += frames * mean_inv_var.transpose();
  ll.rowwise() += gconst.transpose();
  return ll;
}

MatrixXd gmm_posteriors(const DiagonalGmm &g,
                        const Eigen::Ref<const RowMatrixXd> &frames,
                        double *total_log_like) {
  MatrixXd post = component_log_likelihoods(g, frames);
  double total = 0.0;
  for (Eigen::Index n = 0; n < post.rows(); ++n) {
    double max = post.row(n).maxCoeff();
    double sum = (post.row(n).array() - max).exp().sum();
    double log_norm = max + std::log(sum);
    post.row(n) = (post.row(n).array() - log_norm).exp();
    total += log_norm;
  }
  if (total_log_like) *total_log_like = total;
  return post;
}

VectorXd gmm_posteriors(const DiagonalGmm &g, const Eigen::Ref<const VectorXd> &frame) {
  RowMatrixXd one = frame.transpose();
  return gmm_posteriors(g, one, nullptr).row(0).transpose();
}

namespace {

DiagonalGmm KMeansPlusPlusInit(const Eigen::Ref<const RowMatrixXd> &frames,
                               int num_components, const VectorXd &global_var,
                               Rng *rng) {
  const Eigen::Index n = frames.rows();
  DiagonalGmm g;
  g.weights = VectorXd::Constant(num_components, 1.0 / num_components);
  g.means.resize(num_components, frames.cols());
  g.variances = global_var.transpose().replicate(num_components, 1);

  VectorXd min_dist = VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  Eigen::Index chosen = static_cast<Eigen::Index>(rng->Index(n));
  for (int k = 0; k < num_components; ++k) {
    g.means.row(k) = frames.row(chosen);
    for (Eigen::Index i = 0; i < n; ++i) {
      double d = (frames.row(i) - g.means.row(k)).squaredNorm();
      if (d < min_dist(i)) min_dist(i) = d;
    }
    if (k + 1 == num_components) break;
    double total = min_dist.sum();
    if (total <= 0.0) {
      // Fewer distinct frames than components.
      chosen = static_cast<Eigen::Index>(rng->Index(n));
      continue;
    }
    double target = rng->Uniform() * total, acc = 0.0;
    chosen = n - 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      acc += min_dist(i);
      if (acc > target && min_dist(i) > 0.0) {
        chosen = i;
        break;
      }
    }
  }
  return g;
}

// One pass over the data: accumulates zeroth, first and second order stats
// under `g` and returns the total log-likelihood.
double Accumulate(const DiagonalGmm &g, const Eigen::Ref<const RowMatrixXd> &frames,
                  VectorXd *occ, MatrixXd *first, MatrixXd *second) {
  const Eigen::Index n = frames.rows();
  occ->setZero(g.num_components());
  first->setZero(g.num_components(), g.dim());
  second->setZero(g.num_components(), g.dim());
  double total = 0.0;
  for (Eigen::Index start = 0; start < n; start += kBlockFrames) {
    Eigen::Index len = std::min(kBlockFrames, n - start);
    auto block = frames.middleRows(start, len);
    double block_ll = 0.0;
    MatrixXd post = gmm_posteriors(g, block, &block_ll);
    total += block_ll;
    *occ += post.colwise().sum().transpose();
    first->noalias() += post.transpose() * block;
    second->noalias() += post.transpose() * block.array().square().matrix();
  }
  return total;
}

}  // namespace

GmmTrainResult gmm_em_train(const Eigen::Ref<const RowMatrixXd> &frames,
                            int num_components, const GmmTrainOptions &opts) {
  const Eigen::Index n = frames.rows();
  if (num_components < 1) throw Error("GMM needs at least one component");
  if (n < 10 * static_cast<Eigen::Index>(num_components))
    throw Error("too few frames for GMM training: " + std::to_string(n) +
                " < 10 x " + std::to_string(num_components));
  if (!frames.allFinite()) throw Error("non-finite frames in GMM training data");

  VectorXd global_mean = frames.colwise().mean().transpose();
  VectorXd global_var =
      (frames.array().square().colwise().mean().transpose() -
       global_mean.array().square())
          .matrix();
  if (global_var.maxCoeff() <= 0.0)
    throw Error("degenerate GMM training data: all frames identical");
  // Dimensions with no spread still need a usable floor.
  VectorXd floor = opts.var_floor_factor * global_var;
  double fallback = opts.var_floor_factor * global_var.maxCoeff();
  for (Eigen::Index j = 0; j < floor.size(); ++j)
    if (floor(j) <= 0.0) floor(j) = fallback;
  global_var = global_var.cwiseMax(floor);

  Rng rng(opts.seed);
  GmmTrainResult result;
  result.gmm = KMeansPlusPlusInit(frames, num_components, global_var, &rng);
  DiagonalGmm &g = result.gmm;

  VectorXd occ;
  MatrixXd first, second;
  for (int iter = 0; iter <= opts.iters; ++iter) {
    double ll = Accumulate(g, frames, &occ, &first, &second);
    result.log_likelihood.push_back(ll);
    if (iter == opts.iters) break;
    for (int k = 0; k < num_components; ++k) {
      double count = occ(k);
      g.weights(k) = count / double(n);
      if (count < 1e-10) continue;  // keep the old mean and variance
      g.means.row(k) = first.row(k) / count;
      VectorXd var = (second.row(k) / count).transpose() -
                     g.means.row(k).transpose().cwiseAbs2();
      g.variances.row(k) = var.cwiseMax(floor).transpose();
    }
    g.weights /= g.weights.sum();
    LogLine() << "GMM EM iteration " << iter << ": average log-likelihood "
              << ll / double(n);
  }
  return result;
}

}  // namespace antispoof
