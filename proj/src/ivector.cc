// antispoof/ivector.cc

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

#include "antispoof/ivector.h"

#include <cmath>
#include <string>

namespace antispoof {

namespace {

// Above this many doubles the per-component T_c' S_c^-1 T_c matrices are not
// cached and the precision is rebuilt from T for every utterance.
constexpr Eigen::Index kMaxCachedDoubles = Eigen::Index(1) << 25;

constexpr Eigen::Index kUttBlock = 64;

// f - n m, flattened component-major to match the rows of T.
VectorXd CenteredSupervector(const BwStats &stats, const DiagonalGmm &ubm) {
  RowMatrixXd centered = stats.f - stats.n.asDiagonal() * ubm.means;
  return Eigen::Map<const VectorXd>(centered.data(), centered.size());
}

}  // namespace

BwStats &BwStats::operator+=(const BwStats &other) {
  if (n.size() != other.n.size() || f.rows() != other.f.rows() ||
      f.cols() != other.f.cols())
    throw Error("cannot add Baum-Welch stats of different shapes");
  n += other.n;
  f += other.f;
  return *this;
}

BwStats operator+(BwStats a, const BwStats &b) {
  a += b;
  return a;
}

BwStats collect_bw_stats(const DiagonalGmm &g,
                         const Eigen::Ref<const RowMatrixXd> &feats) {
  if (feats.cols() != g.dim())
    throw Error("feature dim " + std::to_string(feats.cols()) +
                " does not match UBM dim " + std::to_string(g.dim()));
  MatrixXd post = gmm_posteriors(g, feats, nullptr);
  BwStats s;
  s.n = post.colwise().sum().transpose();
  s.f = post.transpose() * feats;
  return s;
}

IvectorExtractor::IvectorExtractor(const TvModel &tv) : tv_(tv) {
  const Eigen::Index c = tv.ubm.num_components(), d = tv.ubm.dim(), r = tv.rank();
  if (tv.t_matrix.rows() != c * d)
    throw Error("T has " + std::to_string(tv.t_matrix.rows()) +
                " rows, expected C x d = " + std::to_string(c * d));
  RowMatrixXd inv_var = tv.ubm.variances.cwiseInverse();
  VectorXd inv_var_super = Eigen::Map<const VectorXd>(inv_var.data(), inv_var.size());
  t_scaled_ = inv_var_super.asDiagonal() * tv.t_matrix;
  if (c * r * r <= kMaxCachedDoubles) {
    t_var_t_.resize(c);
    for (Eigen::Index k = 0; k < c; ++k)
      t_var_t_[k] = tv.block(k).transpose() * t_scaled_.middleRows(k * d, d);
  }
}

void IvectorExtractor::CheckStats(const BwStats &stats) const {
  const Eigen::Index c = tv_.ubm.num_components(), d = tv_.ubm.dim();
  if (stats.n.size() != c || stats.f.rows() != c || stats.f.cols() != d)
    throw Error("Baum-Welch stats shape does not match the TV model");
  if (!stats.n.allFinite() || !stats.f.allFinite())
    throw Error("non-finite Baum-Welch stats");
}

MatrixXd IvectorExtractor::Precision(const VectorXd &n) const {
  const Eigen::Index r = tv_.rank(), d = tv_.ubm.dim();
  MatrixXd precision = MatrixXd::Identity(r, r);
  if (!t_var_t_.empty()) {
    for (Eigen::Index k = 0; k < n.size(); ++k)
      if (n(k) != 0.0) precision.noalias() += n(k) * t_var_t_[k];
  } else {
    VectorXd weight(n.size() * d);
    for (Eigen::Index k = 0; k < n.size(); ++k) weight.segment(k * d, d).setConstant(n(k));
    precision.noalias() +=
        tv_.t_matrix.transpose() * (weight.asDiagonal() * t_scaled_);
  }
  return precision;
}

VectorXd IvectorExtractor::Linear(const BwStats &stats) const {
  return t_scaled_.transpose() * CenteredSupervector(stats, tv_.ubm);
}

IVector IvectorExtractor::Extract(const BwStats &stats, MatrixXd *covariance) const {
  CheckStats(stats);
  MatrixXd precision = Precision(stats.n);
  Eigen::LLT<MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success)
    throw Error("i-vector posterior precision is not positive definite");
  IVector iv;
  iv.values = llt.solve(Linear(stats));
  if (covariance)
    *covariance = llt.solve(MatrixXd::Identity(tv_.rank(), tv_.rank()));
  return iv;
}

IVector extract_ivector(const TvModel &tv, const BwStats &stats) {
  return IvectorExtractor(tv).Extract(stats);
}

TvTrainResult tv_train(const std::vector<BwStats> &stats, const DiagonalGmm &ubm,
                       int rank, const TvTrainOptions &opts) {
  const Eigen::Index c = ubm.num_components(), d = ubm.dim();
  const Eigen::Index num_utts = static_cast<Eigen::Index>(stats.size());
  if (rank < 1) throw Error("TV rank must be positive");
  if (num_utts < rank)
    throw Error("TV training needs at least rank = " + std::to_string(rank) +
                " utterances, got " + std::to_string(num_utts));
  if (rank > c * d)
    throw Error("TV rank " + std::to_string(rank) +
                " exceeds the supervector dimension " + std::to_string(c * d));
  for (const BwStats &s : stats)
    if (s.n.size() != c || s.f.rows() != c || s.f.cols() != d)
      throw Error("Baum-Welch stats shape does not match the UBM");

  TvTrainResult result;
  result.model.ubm = ubm;
  MatrixXd &t = result.model.t_matrix;
  t.resize(c * d, rank);
  Rng rng(opts.seed);
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    for (Eigen::Index j = 0; j < t.cols(); ++j) t(i, j) = rng.Uniform(-0.1, 0.1);

  const Eigen::Index r = rank, rr = r * r;
  for (int iter = 0; iter <= opts.iters; ++iter) {
    IvectorExtractor extractor(result.model);
    MatrixXd acc_second = MatrixXd::Zero(c, rr);    // row k: sum n_k E[ww']
    MatrixXd acc_first = MatrixXd::Zero(c * d, r);  // sum (f - n m) E[w]'
    VectorXd occupancy = VectorXd::Zero(c);
    double objective = 0.0;

    for (Eigen::Index start = 0; start < num_utts; start += kUttBlock) {
      const Eigen::Index len = std::min(kUttBlock, num_utts - start);
      MatrixXd second(rr, len), means(r, len), centered(c * d, len), counts(c, len);
      std::vector<double> terms(len);
      ParallelFor(static_cast<std::size_t>(len), opts.jobs, [&](std::size_t i) {
        const BwStats &s = stats[start + i];
        Eigen::LLT<MatrixXd> llt(extractor.Precision(s.n));
        if (llt.info() != Eigen::Success)
          throw Error("TV E-step: posterior precision not positive definite");
        VectorXd b = extractor.Linear(s);
        VectorXd w = llt.solve(b);
        MatrixXd ww = llt.solve(MatrixXd::Identity(r, r));
        ww.noalias() += w * w.transpose();
        double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
        terms[i] = 0.5 * b.dot(w) - 0.5 * log_det;
        second.col(i) = Eigen::Map<const VectorXd>(ww.data(), rr);
        means.col(i) = w;
        centered.col(i) = CenteredSupervector(s, ubm);
        counts.col(i) = s.n;
      });
      for (double v : terms) objective += v;
      acc_second.noalias() += counts * second.transpose();
      acc_first.noalias() += centered * means.transpose();
      occupancy += counts.rowwise().sum();
    }
    result.objective.push_back(objective);
    LogLine() << "TV EM iteration " << iter << ": objective per utterance "
              << objective / double(num_utts);
    if (iter == opts.iters) break;

    for (Eigen::Index k = 0; k < c; ++k) {
      if (occupancy(k) <= 0.0) continue;  // no evidence for this component
      VectorXd packed = acc_second.row(k).transpose();
      Eigen::LLT<MatrixXd> llt(Eigen::Map<const MatrixXd>(packed.data(), r, r));
      if (llt.info() != Eigen::Success)
        throw Error("TV M-step: singular accumulator for component " +
                    std::to_string(k));
      t.middleRows(k * d, d) =
          llt.solve(acc_first.middleRows(k * d, d).transpose()).transpose();
    }
  }
  return result;
}

IVector postprocess_ivector(const IVector &v, const VectorXd &training_mean) {
  if (v.normalized) throw Error("i-vector is already normalized");
  if (v.values.size() != training_mean.size())
    throw Error("i-vector dim " + std::to_string(v.values.size()) +
                " != training mean dim " + std::to_string(training_mean.size()));
  VectorXd centered = v.values - training_mean;
  double norm = centered.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw Error("i-vector is zero after centering; utterance unusable");
  return IVector{centered / norm, true};
}

IVector fuse_ivectors(const std::vector<IVector> &parts) {
  if (parts.empty()) throw Error("cannot fuse an empty list of i-vectors");
  Eigen::Index total = 0;
  for (const IVector &p : parts) {
    if (p.normalized != parts.front().normalized)
      throw Error("cannot fuse i-vectors with mixed normalization");
    total += p.values.size();
  }
  IVector out;
  out.values.resize(total);
  Eigen::Index offset = 0;
  for (const IVector &p : parts) {
    out.values.segment(offset, p.values.size()) = p.values;
    offset += p.values.size();
  }
  out.normalized = parts.size() == 1 && parts.front().normalized;
  return out;
}

}  // namespace antispoof
