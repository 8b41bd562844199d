// tests/gmm-test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "antispoof/gmm.h"
#include "test-util.h"

using namespace antispoof;
using antispoof::testing::RandomNormal;

namespace {

// log(w_c) + log N(x; mu_c, diag var_c), one term at a time.
double LogJointOracle(const DiagonalGmm &g, int c, const VectorXd &x) {
  double acc = std::log(g.weights(c));
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    double v = g.variances(c, j), diff = x(j) - g.means(c, j);
    acc += -0.5 * std::log(2.0 * std::numbers::pi * v) - 0.5 * diff * diff / v;
  }
  return acc;
}

DiagonalGmm TwoSymmetric() {
  DiagonalGmm g;
  g.weights = VectorXd::Constant(2, 0.5);
  g.means.resize(2, 2);
  g.means << -1, 0, 1, 0;
  g.variances = MatrixXd::Ones(2, 2);
  return g;
}

}  // namespace

TEST_CASE("posteriors: single component, symmetry, normalization") {
  DiagonalGmm one;
  one.weights = VectorXd::Ones(1);
  one.means = MatrixXd::Zero(1, 3);
  one.variances = MatrixXd::Ones(1, 3);
  VectorXd x(3);
  x << 0.3, -2.0, 5.0;
  CHECK(gmm_posteriors(one, x)(0) == 1.0);

  DiagonalGmm two = TwoSymmetric();
  VectorXd mid = VectorXd::Zero(2);
  VectorXd p = gmm_posteriors(two, mid);
  CHECK(std::abs(p(0) - 0.5) < 1e-12);
  CHECK(std::abs(p(1) - 0.5) < 1e-12);

  // far-away frames do not underflow to all zeros
  VectorXd far(2);
  far << 1e4, 0.0;
  p = gmm_posteriors(two, far);
  CHECK(p.allFinite());
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p(1) == 1.0);

  Rng rng(1);
  DiagonalGmm g;
  g.weights = VectorXd::Random(5).cwiseAbs() + VectorXd::Constant(5, 0.1);
  g.weights /= g.weights.sum();
  g.means = RandomNormal(rng, 5, 4);
  g.variances = RandomNormal(rng, 5, 4).cwiseAbs().array() + 0.2;
  RowMatrixXd frames = RandomNormal(rng, 50, 4) * 2.0;
  double total = 0.0;
  MatrixXd post = gmm_posteriors(g, frames, &total);
  MatrixXd ll = component_log_likelihoods(g, frames);
  double oracle_total = 0.0;
  for (Eigen::Index n = 0; n < 50; ++n) {
    VectorXd x = frames.row(n).transpose();
    VectorXd single = gmm_posteriors(g, x);
    CHECK(single.sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((single - post.row(n).transpose()).cwiseAbs().maxCoeff() < 1e-12);
    double lse = -1e300;
    for (int c = 0; c < 5; ++c) {
      double lj = LogJointOracle(g, c, x);
      CHECK(ll(n, c) == doctest::Approx(lj).epsilon(1e-12));
      lse = std::max(lse, lj) + std::log1p(std::exp(-std::abs(lse - lj)));
    }
    for (int c = 0; c < 5; ++c)
      CHECK(post(n, c) == doctest::Approx(std::exp(LogJointOracle(g, c, x) - lse)).epsilon(1e-10));
    oracle_total += lse;
  }
  CHECK(total == doctest::Approx(oracle_total).epsilon(1e-12));
}

TEST_CASE("EM with one component is the sample moments") {
  Rng rng(2);
  RowMatrixXd frames = RandomNormal(rng, 200, 36);
  frames.array() *= 3.0;
  frames.rowwise() += Eigen::RowVectorXd::Constant(36, 1.5);
  GmmTrainOptions opts;
  opts.iters = 1;
  GmmTrainResult r = gmm_em_train(frames, 1, opts);
  VectorXd mean = frames.colwise().mean().transpose();
  VectorXd var = (frames.rowwise() - mean.transpose()).array().square().colwise().sum() / 200.0;
  CHECK(r.gmm.weights(0) == doctest::Approx(1.0));
  CHECK((r.gmm.means.row(0).transpose() - mean).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r.gmm.variances.row(0).transpose() - var).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(r.log_likelihood.size() == 2);
}

TEST_CASE("EM log-likelihood never decreases") {
  Rng rng(3);
  RowMatrixXd frames = RandomNormal(rng, 1000, 36);
  GmmTrainOptions opts;
  opts.iters = 10;
  opts.seed = 11;
  GmmTrainResult r = gmm_em_train(frames, 8, opts);
  REQUIRE(r.log_likelihood.size() == 11);
  for (std::size_t i = 1; i < r.log_likelihood.size(); ++i)
    CHECK(r.log_likelihood[i] - r.log_likelihood[i - 1] >=
          -1e-8 * std::abs(r.log_likelihood[i - 1]));
  CHECK(std::abs(r.gmm.weights.sum() - 1.0) < 1e-12);
  VectorXd global = (frames.rowwise() - frames.colwise().mean()).array().square().colwise().mean();
  for (int c = 0; c < 8; ++c)
    for (int j = 0; j < 36; ++j) CHECK(r.gmm.variances(c, j) >= 1e-3 * global(j) * (1 - 1e-12));
  CHECK_NOTHROW(CheckGmm(r.gmm));
}

TEST_CASE("EM recovers two separated clusters") {
  Rng rng(4);
  RowMatrixXd frames = RandomNormal(rng, 2000, 2);
  for (int i = 0; i < 2000; ++i) frames(i, 0) += i < 1000 ? 10.0 : -10.0;
  GmmTrainOptions opts;
  opts.iters = 10;
  GmmTrainResult r = gmm_em_train(frames, 2, opts);
  int pos = r.gmm.means(0, 0) > 0 ? 0 : 1;
  CHECK(std::abs(r.gmm.means(pos, 0) - 10.0) < 0.1);
  CHECK(std::abs(r.gmm.means(pos, 1)) < 0.1);
  CHECK(std::abs(r.gmm.means(1 - pos, 0) + 10.0) < 0.1);
  CHECK(std::abs(r.gmm.means(1 - pos, 1)) < 0.1);
  CHECK(r.gmm.weights(0) == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("EM is reproducible for a fixed seed") {
  Rng rng(5);
  RowMatrixXd frames = RandomNormal(rng, 600, 5);
  GmmTrainOptions opts;
  opts.seed = 99;
  GmmTrainResult a = gmm_em_train(frames, 4, opts), b = gmm_em_train(frames, 4, opts);
  CHECK(a.gmm.means == b.gmm.means);
  CHECK(a.gmm.variances == b.gmm.variances);
  CHECK(a.gmm.weights == b.gmm.weights);
  CHECK(a.log_likelihood == b.log_likelihood);
}

TEST_CASE("EM errors") {
  Rng rng(6);
  GmmTrainOptions opts;
  CHECK_THROWS_AS(gmm_em_train(RandomNormal(rng, 79, 3), 8, opts), Error);
  CHECK_THROWS_AS(gmm_em_train(RowMatrixXd::Constant(100, 3, 2.0), 2, opts), Error);
  RowMatrixXd bad = RandomNormal(rng, 100, 3);
  bad(4, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(gmm_em_train(bad, 2, opts), Error);
  CHECK_THROWS_AS(gmm_em_train(RandomNormal(rng, 100, 3), 0, opts), Error);

  DiagonalGmm g = TwoSymmetric();
  g.weights(0) = 0.7;
  CHECK_THROWS_AS(CheckGmm(g), Error);
  g = TwoSymmetric();
  g.variances(1, 1) = 0.0;
  CHECK_THROWS_AS(CheckGmm(g), Error);
}
