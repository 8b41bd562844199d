// tests/dbn-test.cc

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

#include <algorithm>
#include <cmath>

#include "antispoof/dbn.h"
#include "antispoof/svm.h"
#include "oracles.h"
#include "test-util.h"

using namespace antispoof;
using namespace antispoof::oracles;
using antispoof::testing::RandomNormal;

namespace {

void TwoClusters(Rng &rng, int n, int d, MatrixXd *x, std::vector<int> *y) {
  *x = RandomNormal(rng, n, d) * 0.5;
  y->resize(n);
  for (int i = 0; i < n; ++i) {
    (*y)[i] = i % 2 ? kHumanLabel : kSpoofLabel;
    x->row(i).array() += (*y)[i] * 1.5;
  }
}

}  // namespace

TEST_CASE("analytic gradient matches central differences") {
  Rng rng(1);
  MatrixXd x = RandomNormal(rng, 7, 5);
  std::vector<int> y{1, -1, -1, 1, 1, -1, 1};
  for (double decay : {0.0, 0.05}) {
    DbnTrainOptions opts;
    opts.human_weight = 1.7;
    opts.weight_decay = decay;
    DbnModel m = ToyNet(rng);
    DbnModel grad;
    dbn_loss(m, x, y, opts, &grad);
    std::vector<double> analytic = Flatten(grad);
    std::vector<double> numeric;
    const double h = 1e-5;
    DbnModel probe = m;
    ForEachParam(probe, [&](double &p, Eigen::Index) {
      double keep = p;
      p = keep + h;
      double up = dbn_loss(probe, x, y, opts);
      p = keep - h;
      double down = dbn_loss(probe, x, y, opts);
      p = keep;
      numeric.push_back((up - down) / (2.0 * h));
    });
    REQUIRE(numeric.size() == analytic.size());
    REQUIRE(analytic.size() == 4 * 5 + 4 + 3 * 4 + 3 + 2 * 3 + 2);
    for (std::size_t i = 0; i < numeric.size(); ++i) {
      double scale = std::max({std::abs(numeric[i]), std::abs(analytic[i]), 1e-6});
      CHECK(std::abs(numeric[i] - analytic[i]) / scale < 1e-4);
    }
  }
}

TEST_CASE("softmax outputs sum to one") {
  Rng rng(2);
  DbnModel m = ToyNet(rng);
  for (int i = 0; i < 100; ++i) {
    Eigen::Vector2d p = dbn_posteriors(m, testing::RandomVector(rng, 5) * 3.0);
    CHECK(std::abs(p.sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("dbn_score") {
  Rng rng(3);
  DbnModel m = ToyNet(rng);
  DbnModel flat = m;
  flat.head.weights.setZero();
  flat.head.bias.setZero();
  VectorXd x = testing::RandomVector(rng, 5);
  CHECK(dbn_score(flat, x) == 0.0);
  Eigen::Vector2d p = dbn_posteriors(flat, x);
  CHECK(p(0) == 0.5);

  DbnModel swapped = m;
  swapped.head.weights.row(0).swap(swapped.head.weights.row(1));
  std::swap(swapped.head.bias(0), swapped.head.bias(1));
  CHECK(dbn_score(swapped, x) == doctest::Approx(-dbn_score(m, x)).epsilon(1e-12));

  std::vector<std::pair<double, double>> pairs;
  for (int i = 0; i < 200; ++i) {
    VectorXd v = testing::RandomVector(rng, 5) * 2.0;
    pairs.emplace_back(dbn_posteriors(m, v)(1), dbn_score(m, v));
    p = dbn_posteriors(m, v);
    CHECK(dbn_score(m, v) == doctest::Approx(std::log(p(1)) - std::log(p(0))).epsilon(1e-9));
  }
  for (const auto &a : pairs)
    for (const auto &b : pairs)
      if (a.first < b.first) CHECK(a.second < b.second);
  CHECK(dbn_score(m, x) == dbn_score(m, x));
  CHECK_THROWS_AS(dbn_score(m, VectorXd::Zero(4)), Error);
}

TEST_CASE("RBM pretraining") {
  Rng rng(4);
  MatrixXd x;
  std::vector<int> y;
  TwoClusters(rng, 256, 6, &x, &y);
  RbmOptions opts;
  opts.layer_dims = {8, 4};
  opts.seed = 5;
  opts.epochs = 0;
  RbmPretrainResult init = rbm_pretrain(x, opts);
  REQUIRE(init.layers.size() == 2);
  CHECK(init.layers[0].gaussian_visible);
  CHECK_FALSE(init.layers[1].gaussian_visible);
  CHECK(init.layers[0].weights.rows() == 8);
  CHECK(init.layers[0].weights.cols() == 6);
  CHECK(init.layers[1].weights.rows() == 4);
  CHECK(init.layers[1].weights.cols() == 8);
  CHECK(rbm_pretrain(x, opts).layers[1].weights == init.layers[1].weights);

  opts.epochs = 30;
  opts.learning_rate = 0.01;
  RbmPretrainResult a = rbm_pretrain(x, opts), b = rbm_pretrain(x, opts);
  for (int l = 0; l < 2; ++l) {
    CHECK(a.layers[l].weights == b.layers[l].weights);
    CHECK(a.layers[l].hidden_bias == b.layers[l].hidden_bias);
    CHECK(a.layers[l].visible_bias == b.layers[l].visible_bias);
  }
  // median reconstruction error over consecutive 5-epoch windows
  const std::vector<double> &err = a.reconstruction_error[0];
  REQUIRE(err.size() == 30);
  double prev = 1e300;
  for (int w = 0; w < 6; ++w) {
    std::vector<double> win(err.begin() + 5 * w, err.begin() + 5 * w + 5);
    for (double e : win) CHECK(std::isfinite(e));
    std::nth_element(win.begin(), win.begin() + 2, win.end());
    CHECK(win[2] <= prev);
    prev = win[2];
  }

  MatrixXd bad = x;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(rbm_pretrain(bad, opts), Error);
  opts.layer_dims.clear();
  CHECK_THROWS_AS(rbm_pretrain(x, opts), Error);
}

TEST_CASE("fine-tuning separates a separable toy set") {
  Rng rng(6);
  MatrixXd x;
  std::vector<int> y;
  TwoClusters(rng, 200, 4, &x, &y);
  RbmOptions ropts;
  ropts.layer_dims = {8};
  ropts.epochs = 5;
  RbmPretrainResult pre = rbm_pretrain(x, ropts);
  DbnTrainOptions opts;
  opts.epochs = 200;
  DbnModel m = dbn_train(pre.layers, x, y, opts);
  int correct = 0;
  for (int i = 0; i < 200; ++i)
    correct += (dbn_score(m, x.row(i).transpose()) > 0.0) == (y[i] == kHumanLabel);
  CHECK(correct == 200);
  DbnModel again = dbn_train(pre.layers, x, y, opts);
  CHECK(again.head.weights == m.head.weights);
  CHECK(again.hidden[0].weights == m.hidden[0].weights);

  CHECK_THROWS_AS(dbn_train(pre.layers, MatrixXd(x.leftCols(3)), y, opts), Error);
  std::vector<int> one_class(200, kHumanLabel);
  CHECK_THROWS_AS(dbn_train(pre.layers, x, one_class, opts), Error);
  DbnModel broken = m;
  broken.head.weights = MatrixXd::Zero(3, 8);
  CHECK_THROWS_AS(CheckDbn(broken), Error);
}
