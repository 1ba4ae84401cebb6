#include <doctest.h>

#include <cmath>
#include <random>

#include "radarcount/metrics.hpp"

using namespace radarcount;

TEST_CASE("RMSE and MAE basics") {
  const std::vector<int> labels = {0, 1, 2, 3};
  const std::vector<double> exact = {0, 1, 2, 3};
  auto r = rmse_mae(exact, labels);
  CHECK(r.rmse == 0.0);
  CHECK(r.mae == 0.0);
  CHECK(r.n == 4);

  const std::vector<double> shifted = {1, 2, 3, 4};
  r = rmse_mae(shifted, labels);
  CHECK(r.rmse == 1.0);
  CHECK(r.mae == 1.0);

  const std::vector<double> preds = {0.0, 4.0};
  const std::vector<int> ys = {0, 1};
  r = rmse_mae(preds, ys);
  CHECK(r.mae == 1.5);
  CHECK(r.rmse == doctest::Approx(std::sqrt(4.5)).epsilon(1e-15));
  CHECK(r.rmse == doctest::Approx(2.1213).epsilon(1e-4));
  CHECK(r.per_class_mae.at(0) == 0.0);
  CHECK(r.per_class_mae.at(1) == 3.0);

  CHECK_THROWS(rmse_mae(preds, labels));
  CHECK_THROWS(rmse_mae(std::vector<double>{}, std::vector<int>{}));
}

TEST_CASE("RMSE is never below MAE") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.5);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> p(25);
    std::vector<int> y(25);
    for (int i = 0; i < 25; ++i) {
      y[i] = i % 4;
      p[i] = y[i] + g(rng) * (rep % 5);
    }
    const auto r = rmse_mae(p, y);
    CHECK(r.rmse >= r.mae);
    CHECK(r.mae >= 0.0);
  }
}

TEST_CASE("Fisher score by hand") {
  Eigen::MatrixXd x(4, 1);
  x << -1e-3, 1e-3, 1.0 - 1e-3, 1.0 + 1e-3;
  const std::vector<int> labels = {0, 0, 1, 1};
  // between = 2 (0.5)^2 + 2 (0.5)^2 = 1, within = 4 * 1e-6
  const auto f = fisher_score(x, labels);
  CHECK(std::abs(f.score - 1.0 / 4e-6) <= 1e-9 * 2.5e5);
  CHECK(f.skipped.empty());
}

TEST_CASE("Fisher score with equal class means is zero") {
  Eigen::MatrixXd x(6, 2);
  x << 0, 5, 2, 7, 1, 6, 1, 6, 0, 7, 2, 5;
  const std::vector<int> labels = {0, 0, 0, 1, 1, 1};
  CHECK(fisher_score(x, labels).score == doctest::Approx(0.0));
}

TEST_CASE("Fisher score is invariant to per-feature affine rescaling") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd x(40, 5);
  std::vector<int> labels(40);
  for (int i = 0; i < 40; ++i) {
    labels[i] = i % 4;
    for (int j = 0; j < 5; ++j) x(i, j) = g(rng) + 0.3 * labels[i] * j;
  }
  const double base = fisher_score(x, labels).score;
  CHECK(fisher_score(x * 17.0, labels).score == doctest::Approx(base).epsilon(1e-12));
  Eigen::MatrixXd y = x;
  for (int j = 0; j < 5; ++j) y.col(j) = y.col(j) * (0.1 + j) + Eigen::VectorXd::Constant(40, 3.0 * j);
  CHECK(fisher_score(y, labels).score == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("features without within-class spread are skipped and recorded") {
  Eigen::MatrixXd x(4, 2);
  x << 0, 0.1, 0, 0.3, 1, 0.2, 1, 0.5;
  const std::vector<int> labels = {0, 0, 1, 1};
  const auto f = fisher_score(x, labels);
  REQUIRE(f.skipped.size() == 1);
  CHECK(f.skipped[0] == 0);
  CHECK(std::isnan(f.per_feature(0)));
  CHECK(f.score == f.per_feature(1));

  CHECK_THROWS(fisher_score(x, std::vector<int>{0, 0, 0, 0}));
  CHECK_THROWS(fisher_score(x, std::vector<int>{0, 0, 0, 1}));
}
