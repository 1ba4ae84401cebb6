#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "radarcount/augment.hpp"
#include "radarcount/pipeline.hpp"
#include "radarcount/preprocess.hpp"

using namespace radarcount;

namespace {

// Cells in row 0 alternate 0, h so their population std is exactly h / 2.
RadarCube alternating_cube(const std::vector<float>& heights) {
  RadarCube c(60, 1, static_cast<int>(heights.size()));
  for (int t = 0; t < 60; ++t)
    for (int a = 0; a < c.azimuth_bins(); ++a) c.at(t, 0, a) = (t % 2) ? heights[a] : 0.0f;
  return c;
}

}  // namespace

TEST_CASE("std map: constant cube gives zeros, alternating cell gives 0.5") {
  RadarCube c(60, 12, 91);
  c.amplitudes().setConstant(0.3f);
  CHECK(std_map(c).values.maxCoeff() == 0.0);
  CHECK(std_map(alternating_cube({1.0f})).values(0, 0) == 0.5);
}

TEST_CASE("std map matches the two-pass oracle") {
  const auto c = testutil::random_cube(9);
  const auto sm = std_map(c);
  CHECK(sm.values.rows() == 12);
  CHECK(sm.values.cols() == 91);
  for (int r = 0; r < 12; ++r)
    for (int a = 0; a < 91; ++a) CHECK(sm.values(r, a) == doctest::Approx(testutil::naive_std(c, r, a)).epsilon(1e-9));
  CHECK_THROWS(std_map(RadarCube(1, 2, 2)));
}

TEST_CASE("threshold zeroing is inclusive at equality") {
  // stds: 0.25, 0.5, 0.75
  const auto c = alternating_cube({0.5f, 1.0f, 1.5f});
  const auto out = threshold_zero(c, 0.5);
  CHECK(out.amplitudes().col(0).isZero(0.0));
  CHECK(out.amplitudes().col(1).isZero(0.0));
  CHECK(out.amplitudes().col(2) == c.amplitudes().col(2));
}

TEST_CASE("threshold zeroing on a synthetic static background") {
  auto c = testutil::random_cube(1, 60, 12, 91, 0.0f, 0.01f);  // std ~0.003 everywhere
  for (int t = 0; t < 60; ++t) c.at(t, 5, 40) = (t % 2) ? 0.9f : 0.1f;
  const auto out = threshold_zero(c, kDefaultTau);
  for (int k = 0; k < c.cells(); ++k) {
    if (k == c.cell_index(5, 40)) {
      CHECK(out.amplitudes().col(k) == c.amplitudes().col(k));
    } else {
      CHECK(out.amplitudes().col(k).isZero(0.0));
    }
  }
}

TEST_CASE("threshold zeroing limits") {
  const auto c = testutil::random_cube(2);
  CHECK(threshold_zero(c, 0.0) == c);
  CHECK(threshold_zero(c, std::numeric_limits<double>::infinity()).amplitudes().isZero(0.0));
  CHECK_THROWS(threshold_zero(c, -1.0));
}

TEST_CASE("sigmoid weight values") {
  StdMap sm;
  sm.values.resize(1, 5);
  sm.values << 0.02, 0.013, 0.046, 0.0, 1.0;
  const auto w = sigmoid_weight_map(sm, {0.02, 0.01});
  CHECK(w.values(0, 0) == 0.5);
  CHECK(w.values(0, 1) == doctest::Approx(1.0 / (1.0 + std::exp(0.7))).epsilon(1e-12));
  CHECK(w.values(0, 1) == doctest::Approx(0.3318).epsilon(1e-4));
  CHECK(w.values(0, 2) == doctest::Approx(1.0 / (1.0 + std::exp(-2.6))).epsilon(1e-12));
  CHECK(w.values(0, 2) == doctest::Approx(0.9309).epsilon(1e-4));
  CHECK(w.values(0, 3) < 0.5);
  CHECK(w.values(0, 4) > 0.999);
  CHECK_THROWS(sigmoid_weight_map(sm, {0.02, 0.0}));
}

TEST_CASE("sigmoid weight is monotone, bounded and overflow free") {
  StdMap sm;
  sm.values = SpatialMap(1, 201);
  for (int i = 0; i < 201; ++i) sm.values(0, i) = i * 0.0005;
  const auto w = sigmoid_weight_map(sm, {0.02, 0.01});
  for (int i = 1; i < 201; ++i) CHECK(w.values(0, i) > w.values(0, i - 1));
  CHECK(w.values.minCoeff() > 0.0);
  CHECK(w.values.maxCoeff() < 1.0);

  const auto sharp = sigmoid_weight_map(sm, {0.02, 1e-300});
  CHECK(sharp.values.allFinite());
  CHECK(stable_sigmoid(-1e308) == 0.0);
  CHECK(stable_sigmoid(1e308) == 1.0);
}

TEST_CASE("steep sigmoid converges to the threshold mask") {
  const auto c = testutil::random_cube(5, 60, 12, 91, 0.0f, 0.08f);
  const auto sm = std_map(c);
  const double tau = 0.02;
  const auto w = sigmoid_weight_map(sm, {tau, 1e-6});
  int checked = 0;
  for (Eigen::Index k = 0; k < sm.values.size(); ++k) {
    const double sigma = sm.values.data()[k];
    if (std::abs(sigma - tau) <= 1e-3) continue;
    ++checked;
    CHECK(w.values.data()[k] == (sigma > tau ? 1.0 : 0.0));
  }
  CHECK(checked > 500);
}

TEST_CASE("apply weight") {
  const auto c = testutil::random_cube(3);
  WeightMap ones{SpatialMap::Ones(12, 91)};
  CHECK(apply_weight(c, ones) == c);
  WeightMap zeros{SpatialMap::Zero(12, 91)};
  CHECK(apply_weight(c, zeros).amplitudes().isZero(0.0));

  auto half = ones;
  half.values(4, 7) = 0.5;
  const auto out = apply_weight(c, half);
  for (int k = 0; k < c.cells(); ++k) {
    if (k == c.cell_index(4, 7)) {
      CHECK(out.amplitudes().col(k) == (c.amplitudes().col(k) * 0.5f).eval());
    } else {
      CHECK(out.amplitudes().col(k) == c.amplitudes().col(k));
    }
  }
  CHECK_THROWS(apply_weight(c, WeightMap{SpatialMap::Ones(12, 90)}));
}

TEST_CASE("threshold and weighting commute with spatial flips") {
  const auto c = testutil::random_cube(8, 60, 12, 91, 0.0f, 0.06f);
  for (auto axis : {FlipAxis::Azimuth, FlipAxis::Range, FlipAxis::Both}) {
    const auto a = threshold_zero(flip(c, axis), 0.02);
    const auto b = flip(threshold_zero(c, 0.02), axis);
    CHECK((a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff() <= 1e-12f);

    const auto wf = apply_weight(flip(c, axis), sigmoid_weight_map(std_map(flip(c, axis)), {}));
    const auto fw = flip(apply_weight(c, sigmoid_weight_map(std_map(c), {})), axis);
    CHECK((wf.amplitudes() - fw.amplitudes()).cwiseAbs().maxCoeff() <= 1e-12f);
  }
}

TEST_CASE("transforms leave their input untouched") {
  const auto c = testutil::random_cube(4);
  const auto copy = c;
  (void)threshold_zero(c, 0.3);
  (void)apply_weight(c, sigmoid_weight_map(std_map(c), {}));
  Preprocessor bp(PreprocessConfig{.method = PreprocessMethod::ButterworthBandpass});
  (void)bp(c);
  CHECK(c == copy);
}

TEST_CASE("method selector names") {
  for (auto m : kAllPreprocessMethods) CHECK(preprocess_method_from_string(to_string(m)) == m);
  CHECK(to_string(PreprocessMethod::SigmoidWeight) == "sigmoid_weight");
  CHECK_THROWS(preprocess_method_from_string("autoencoder"));
  CHECK_THROWS(Preprocessor(PreprocessConfig{.method = PreprocessMethod::BackgroundSuppress}));
}

TEST_CASE("method none is the identity") {
  const auto c = testutil::random_cube(6);
  CHECK(Preprocessor(PreprocessConfig{})(c) == c);
}
