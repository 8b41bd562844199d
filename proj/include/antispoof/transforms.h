// antispoof/transforms.h

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

#ifndef ANTISPOOF_TRANSFORMS_H_
#define ANTISPOOF_TRANSFORMS_H_

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "antispoof/common.h"

namespace antispoof {

// ---------------------------------------------------------------------------
// Mel scale and triangular filterbank

/// HTK mel scale, 2595 log10(1 + f / 700). Throws on negative input.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Triangular filters on a linear-frequency grid. Filter i has its feet at
/// edges_hz[i] and edges_hz[i + 2] and its unit peak at edges_hz[i + 1]; the
/// edges are equally spaced on the mel axis from 0 to f_max.
struct MelFilterbank {
  int n_filters = 0;
  double f_max = 0.0;
  std::vector<double> edges_hz;      // n_filters + 2
  std::vector<double> center_freqs;  // n_filters
  MatrixXd weights;                  // n_filters x n_bins

  /// Triangle value of filter i at an arbitrary frequency.
  double weight_at(int filter, double hz) const;
};

/// Samples the filters at bin frequencies k * f_max / (n_bins - 1). Throws
/// if any filter ends up with no positive weight.
MelFilterbank build_mel_filterbank(int n_filters = 24, int n_bins = 129,
                                   double f_max = 8000.0);

// ---------------------------------------------------------------------------
// Orthonormal DCT-II

/// Row j holds the j-th DCT-II basis vector, so dct_matrix(n) * x is the
/// transform of x and its transpose is the inverse.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dct_matrix(int n) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(n, n);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int j = 0; j < n; ++j) {
    Scalar alpha = j == 0 ? std::sqrt(Scalar(1) / n) : std::sqrt(Scalar(2) / n);
    for (int i = 0; i < n; ++i)
      m(j, i) = alpha * std::cos(pi * Scalar(2 * i + 1) * Scalar(j) / Scalar(2 * n));
  }
  return m;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> apply_dct(
    const Eigen::MatrixBase<Derived> &x) {
  using Scalar = typename Derived::Scalar;
  return dct_matrix<Scalar>(static_cast<int>(x.size())) * x.derived();
}

// ---------------------------------------------------------------------------
// PCA

struct PcaModel {
  VectorXd mean;         // d
  MatrixXd basis;        // d x k, orthonormal columns
  VectorXd eigenvalues;  // k, nonincreasing

  Eigen::Index input_dim() const { return mean.size(); }
  Eigen::Index output_dim() const { return basis.cols(); }
  bool empty() const { return basis.size() == 0; }
};

/// Fits on the rows of `data` (N x d). Covariance divisor N - 1; each basis
/// vector has its first nonzero entry made positive.
PcaModel pca_fit(const Eigen::Ref<const MatrixXd> &data, int k);

/// basis^T (x - mean).
VectorXd pca_apply(const PcaModel &m, const Eigen::Ref<const VectorXd> &x);

/// Row-wise pca_apply on an N x d matrix.
MatrixXd pca_apply_rows(const PcaModel &m, const Eigen::Ref<const MatrixXd> &x);

// ---------------------------------------------------------------------------
// Wavelet packet transform

/// Full balanced Daubechies-4 (8-tap) packet tree with periodic extension.
struct WaveletPacketTree {
  int depth = 6;
  std::array<double, 8> low_pass{};
  std::array<double, 8> high_pass{};
  /// leaf_order[f] is the position, in filter-bank (Paley) order, of the leaf
  /// covering the f-th lowest frequency band.
  std::vector<int> leaf_order;

  int num_leaves() const { return 1 << depth; }
};

WaveletPacketTree make_wavelet_packet_tree(int depth = 6);

/// Decomposes a frame whose length is a power of two >= 2^depth. Row f of
/// the result is the f-th lowest frequency leaf (length len / 2^depth).
RowMatrixXd wpt_decompose(const Eigen::Ref<const VectorXd> &frame,
                          const WaveletPacketTree &tree);

/// Inverse of wpt_decompose.
VectorXd wpt_reconstruct(const Eigen::Ref<const RowMatrixXd> &leaves,
                         const WaveletPacketTree &tree);

// ---------------------------------------------------------------------------
// Teager-Kaiser energy

/// psi[t - 1] = s[t]^2 - s[t - 1] s[t + 1] for t = 1 .. L - 2.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> tke(
    const Eigen::MatrixBase<Derived> &s) {
  const Eigen::Index n = s.size();
  if (n < 3) throw Error("Teager-Kaiser energy needs at least 3 samples");
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(n - 2);
  for (Eigen::Index t = 1; t + 1 < n; ++t)
    out(t - 1) = s(t) * s(t) - s(t - 1) * s(t + 1);
  return out;
}

}  // namespace antispoof

#endif  // ANTISPOOF_TRANSFORMS_H_
