// antispoof/transforms.cc

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

#include "antispoof/transforms.h"

#include <string>

namespace antispoof {

double hz_to_mel(double hz) {
  if (!(hz >= 0.0)) throw Error("hz_to_mel: negative frequency");
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

double MelFilterbank::weight_at(int filter, double hz) const {
  double lo = edges_hz[filter], center = edges_hz[filter + 1],
         hi = edges_hz[filter + 2];
  if (hz <= lo || hz >= hi) return 0.0;
  if (hz <= center) return (hz - lo) / (center - lo);
  return (hi - hz) / (hi - center);
}

MelFilterbank build_mel_filterbank(int n_filters, int n_bins, double f_max) {
  if (n_filters < 1) throw Error("mel filterbank needs at least one filter");
  if (n_bins < 2) throw Error("mel filterbank needs at least two bins");
  if (!(f_max > 0.0)) throw Error("mel filterbank f_max must be positive");

  MelFilterbank fb;
  fb.n_filters = n_filters;
  fb.f_max = f_max;
  double mel_max = hz_to_mel(f_max);
  fb.edges_hz.resize(n_filters + 2);
  for (int i = 0; i < n_filters + 2; ++i)
    fb.edges_hz[i] = mel_to_hz(mel_max * i / (n_filters + 1));
  fb.edges_hz.front() = 0.0;
  fb.edges_hz.back() = f_max;
  fb.center_freqs.assign(fb.edges_hz.begin() + 1, fb.edges_hz.end() - 1);

  fb.weights = MatrixXd::Zero(n_filters, n_bins);
  double bin_hz = f_max / (n_bins - 1);
  for (int i = 0; i < n_filters; ++i) {
    for (int k = 0; k < n_bins; ++k) fb.weights(i, k) = fb.weight_at(i, k * bin_hz);
    if (fb.weights.row(i).maxCoeff() <= 0.0)
      throw Error("mel filter " + std::to_string(i) + " of " +
                  std::to_string(n_filters) +
                  " has no support: too many filters for the bin resolution");
  }
  return fb;
}

PcaModel pca_fit(const Eigen::Ref<const MatrixXd> &data, int k) {
  const Eigen::Index n = data.rows(), d = data.cols();
  if (n < 2) throw Error("pca_fit needs at least 2 rows");
  if (k < 1 || k > d)
    throw Error("pca_fit: k = " + std::to_string(k) + " must be in [1, " +
                std::to_string(d) + "]");
  if (!data.allFinite()) throw Error("pca_fit: non-finite input");

  PcaModel m;
  m.mean = data.colwise().mean().transpose();
  MatrixXd centered = data.rowwise() - m.mean.transpose();
  MatrixXd cov = (centered.transpose() * centered) / double(n - 1);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw Error("pca_fit: eigensolver failed");

  m.basis.resize(d, k);
  m.eigenvalues.resize(k);
  for (int j = 0; j < k; ++j) {
    Eigen::Index src = d - 1 - j;  // eigenvalues come out ascending
    m.eigenvalues(j) = std::max(0.0, es.eigenvalues()(src));
    VectorXd v = es.eigenvectors().col(src);
    double scale = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < d; ++i) {
      if (std::abs(v(i)) > 1e-12 * scale) {
        if (v(i) < 0) v = -v;
        break;
      }
    }
    m.basis.col(j) = v;
  }
  return m;
}

VectorXd pca_apply(const PcaModel &m, const Eigen::Ref<const VectorXd> &x) {
  if (x.size() != m.input_dim())
    throw Error("pca_apply: input dim " + std::to_string(x.size()) +
                " != model dim " + std::to_string(m.input_dim()));
  return m.basis.transpose() * (x - m.mean);
}

MatrixXd pca_apply_rows(const PcaModel &m, const Eigen::Ref<const MatrixXd> &x) {
  if (x.cols() != m.input_dim())
    throw Error("pca_apply: input dim " + std::to_string(x.cols()) +
                " != model dim " + std::to_string(m.input_dim()));
  return (x.rowwise() - m.mean.transpose()) * m.basis;
}

namespace {

// Daubechies 4-vanishing-moment scaling filter, from the spectral
// factorization of the maxflat half-band polynomial (computed at 40 digits).
constexpr std::array<double, 8> kDb4LowPass = {
    0.23037781330889650086,  0.71484657055291564709,
    0.63088076792985890788,  -0.027983769416859854211,
    -0.18703481171909308408, 0.030841381835560763627,
    0.032883011666885199735, -0.010597401785069032105,
};

void AnalysisStep(const VectorXd &x, const WaveletPacketTree &tree,
                  VectorXd *low, VectorXd *high) {
  const Eigen::Index n = x.size(), half = n / 2;
  low->setZero(half);
  high->setZero(half);
  for (Eigen::Index i = 0; i < half; ++i) {
    double a = 0.0, d = 0.0;
    for (int j = 0; j < 8; ++j) {
      double v = x((2 * i + j) % n);
      a += tree.low_pass[j] * v;
      d += tree.high_pass[j] * v;
    }
    (*low)(i) = a;
    (*high)(i) = d;
  }
}

VectorXd SynthesisStep(const VectorXd &low, const VectorXd &high,
                       const WaveletPacketTree &tree) {
  const Eigen::Index half = low.size(), n = 2 * half;
  VectorXd x = VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < half; ++i)
    for (int j = 0; j < 8; ++j)
      x((2 * i + j) % n) += tree.low_pass[j] * low(i) + tree.high_pass[j] * high(i);
  return x;
}

}  // namespace

WaveletPacketTree make_wavelet_packet_tree(int depth) {
  if (depth < 1 || depth > 16) throw Error("wavelet packet depth out of range");
  WaveletPacketTree tree;
  tree.depth = depth;
  tree.low_pass = kDb4LowPass;
  for (int n = 0; n < 8; ++n)
    tree.high_pass[n] = (n % 2 == 0 ? 1.0 : -1.0) * kDb4LowPass[7 - n];
  // The high branch mirrors its band, so natural frequency order is the
  // Gray code of the filter-bank order.
  tree.leaf_order.resize(tree.num_leaves());
  for (int f = 0; f < tree.num_leaves(); ++f) tree.leaf_order[f] = f ^ (f >> 1);
  return tree;
}

RowMatrixXd wpt_decompose(const Eigen::Ref<const VectorXd> &frame,
                          const WaveletPacketTree &tree) {
  const Eigen::Index n = frame.size();
  const Eigen::Index leaves = tree.num_leaves();
  if (n < leaves || (n & (n - 1)) != 0)
    throw Error("wpt_decompose: frame length " + std::to_string(n) +
                " is not a power of two >= 2^" + std::to_string(tree.depth));
  std::vector<VectorXd> nodes{frame};
  for (int level = 0; level < tree.depth; ++level) {
    std::vector<VectorXd> next(nodes.size() * 2);
    for (std::size_t p = 0; p < nodes.size(); ++p)
      AnalysisStep(nodes[p], tree, &next[2 * p], &next[2 * p + 1]);
    nodes.swap(next);
  }
  RowMatrixXd out(leaves, n / leaves);
  for (Eigen::Index f = 0; f < leaves; ++f)
    out.row(f) = nodes[tree.leaf_order[f]].transpose();
  return out;
}

VectorXd wpt_reconstruct(const Eigen::Ref<const RowMatrixXd> &leaves,
                         const WaveletPacketTree &tree) {
  if (leaves.rows() != tree.num_leaves())
    throw Error("wpt_reconstruct: expected " +
                std::to_string(tree.num_leaves()) + " leaves");
  std::vector<VectorXd> nodes(leaves.rows());
  for (Eigen::Index f = 0; f < leaves.rows(); ++f)
    nodes[tree.leaf_order[f]] = leaves.row(f).transpose();
  for (int level = 0; level < tree.depth; ++level) {
    std::vector<VectorXd> parents(nodes.size() / 2);
    for (std::size_t p = 0; p < parents.size(); ++p)
      parents[p] = SynthesisStep(nodes[2 * p], nodes[2 * p + 1], tree);
    nodes.swap(parents);
  }
  return nodes[0];
}

}  // namespace antispoof
