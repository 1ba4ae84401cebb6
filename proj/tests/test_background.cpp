#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "radarcount/background.hpp"
#include "radarcount/normalize.hpp"
#include "radarcount/scene.hpp"

using namespace radarcount;

namespace {

// Frames mean + a_t u + b_t v with orthogonal u, v on a 4 x 6 grid.
std::vector<RadarCube> rank2_cubes(int count, std::uint64_t seed, Eigen::VectorXd* mean_out = nullptr) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd mu(24), u(24), v(24);
  for (int i = 0; i < 24; ++i) {
    mu(i) = 0.5 + 0.01 * i;
    u(i) = i < 12 ? 0.25 : 0.0;
    v(i) = (i % 2 ? 0.125 : -0.125);
  }
  if (mean_out) *mean_out = mu;
  std::vector<RadarCube> out;
  for (int c = 0; c < count; ++c) {
    RadarCube cube(20, 4, 6);
    for (int t = 0; t < 20; ++t) {
      const Eigen::VectorXd f = mu + 0.3 * g(rng) * u + 0.2 * g(rng) * v;
      cube.amplitudes().row(t) = f.transpose().cast<float>();
    }
    out.push_back(cube);
  }
  return out;
}

double energy(const Eigen::MatrixXd& m) { return m.squaredNorm(); }

}  // namespace

TEST_CASE("rank 0 keeps only the mean frame") {
  const auto cubes = rank2_cubes(3, 1);
  const auto m = fit_background(cubes, 0);
  CHECK(m.rank() == 0);
  Eigen::VectorXd brute = Eigen::VectorXd::Zero(24);
  for (const auto& c : cubes) brute += c.amplitudes().cast<double>().colwise().sum().transpose();
  brute /= 60.0;
  CHECK((m.mean - brute).cwiseAbs().maxCoeff() <= 1e-12);

  RadarCube mean_cube(5, 4, 6);
  for (int t = 0; t < 5; ++t) mean_cube.amplitudes().row(t) = m.mean.transpose().cast<float>();
  CHECK(background_residual(mean_cube, m).maxCoeff() <= 1e-7);
}

TEST_CASE("rank-2 backgrounds are reconstructed exactly at rank 2") {
  const auto cubes = rank2_cubes(4, 2);
  const auto m = fit_background(cubes, 2, 7);
  CHECK(m.rank() == 2);
  for (const auto& held_out : rank2_cubes(2, 99)) {
    CHECK(background_residual(held_out, m).maxCoeff() <= 1e-6);
    for (int t = 0; t < held_out.frames(); ++t) {
      const Eigen::VectorXd f = held_out.amplitudes().row(t).cast<double>().transpose();
      CHECK((m.reconstruct(f) - f).cwiseAbs().maxCoeff() <= 1e-6);
    }
  }
  const auto m1 = fit_background(cubes, 1, 7);
  CHECK(background_residual(cubes[0], m1).maxCoeff() > 1e-3);
}

TEST_CASE("basis is orthonormal and ordered by explained variance") {
  const auto suite = make_environment_suite_configs(4, 1, 6);
  std::vector<RadarCube> bg;
  for (const auto& s : suite.a_background) bg.push_back(clip_and_normalize(generate_cube(s)).first);
  const auto m = fit_background(bg, 8, 3);
  const Eigen::MatrixXd gram = m.basis.transpose() * m.basis;
  CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-8);

  Eigen::MatrixXd x(0, m.mean.size());
  for (const auto& c : bg) {
    x.conservativeResize(x.rows() + c.frames(), Eigen::NoChange);
    x.bottomRows(c.frames()) = c.amplitudes().cast<double>();
  }
  const Eigen::MatrixXd centered = x.rowwise() - m.mean.transpose();
  const Eigen::VectorXd var = (centered * m.basis).colwise().squaredNorm();
  for (int k = 1; k < 8; ++k) CHECK(var(k) <= var(k - 1) * (1.0 + 1e-9));
}

TEST_CASE("streaming accumulation equals one pooled fit") {
  const auto cubes = rank2_cubes(5, 3);
  BackgroundAccumulator acc;
  for (const auto& c : cubes) acc.add(c);
  CHECK(acc.frames() == 100);

  RadarCube pooled(100, 4, 6);
  for (int i = 0; i < 5; ++i) pooled.amplitudes().middleRows(20 * i, 20) = cubes[i].amplitudes();
  const auto a = acc.fit(2, 5);
  const auto b = fit_background(std::span(&pooled, 1), 2, 5);
  CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() <= 1e-12);
  // Same subspace: projectors agree.
  const Eigen::MatrixXd pa = a.basis * a.basis.transpose();
  const Eigen::MatrixXd pb = b.basis * b.basis.transpose();
  CHECK((pa - pb).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("fitting is deterministic for a fixed seed") {
  const auto cubes = rank2_cubes(3, 4);
  const auto a = fit_background(cubes, 2, 11);
  const auto b = fit_background(cubes, 2, 11);
  CHECK(a.basis == b.basis);
  CHECK(a.mean == b.mean);
}

TEST_CASE("person blob on the background concentrates the residual in its footprint") {
  const auto suite = make_environment_suite_configs(6, 1, 20);
  std::vector<RadarCube> bg;
  for (const auto& s : suite.a_background) bg.push_back(clip_and_normalize(generate_cube(s)).first);
  const auto m = fit_background(bg, kDefaultBackgroundRank, 0);

  const double rc = 6.0, ac = 45.0, sr = 0.8, sa = 3.0;
  RadarCube cube(60, 12, 91);
  for (int t = 0; t < 60; ++t) {
    for (int r = 0; r < 12; ++r) {
      for (int a = 0; a < 91; ++a) {
        const double blob = 0.4 * std::exp(-0.5 * ((r - rc) * (r - rc) / (sr * sr) + (a - ac) * (a - ac) / (sa * sa)));
        cube.at(t, r, a) = static_cast<float>(m.mean(cube.cell_index(r, a)) + blob * (1.0 + 0.1 * std::sin(0.2 * t)));
      }
    }
  }
  const auto res = background_residual(cube, m);
  double inside = 0.0;
  for (int r = 0; r < 12; ++r) {
    for (int a = 0; a < 91; ++a) {
      const bool in = std::abs(r - rc) <= 3.0 * sr && std::abs(a - ac) <= 3.0 * sa;
      if (in) inside += res.col(cube.cell_index(r, a)).squaredNorm();
    }
  }
  CHECK(inside / energy(res) >= 0.8);
}

TEST_CASE("empty rooms leave less residual than occupied ones") {
  const auto suite = make_environment_suite_configs(12, 30, 30);
  std::vector<RadarCube> bg;
  for (const auto& s : suite.a_background) bg.push_back(clip_and_normalize(generate_cube(s)).first);
  const auto m = fit_background(bg, kDefaultBackgroundRank, 0);

  auto median_energy = [&](int label) {
    std::vector<double> e;
    for (const auto& s : suite.a) {
      if (static_cast<int>(s.persons.size()) != label) continue;
      e.push_back(energy(background_residual(clip_and_normalize(generate_cube(s)).first, m)));
    }
    REQUIRE(e.size() >= 30);
    std::nth_element(e.begin(), e.begin() + e.size() / 2, e.end());
    return e[e.size() / 2];
  };
  CHECK(median_energy(0) < median_energy(1));
}

TEST_CASE("background errors") {
  auto cubes = rank2_cubes(2, 5);
  cubes[1].meta.label = 1;
  CHECK_THROWS(fit_background(cubes, 1));
  cubes[1].meta.label = 0;
  CHECK_THROWS(fit_background(cubes, 40));  // more directions than frames
  const auto m = fit_background(cubes, 1);
  CHECK_THROWS(background_residual(RadarCube(20, 4, 7), m));
  CHECK_THROWS(fit_background(std::vector<RadarCube>{}, 1));
}

TEST_CASE("suppression output is renormalised to [0, 1]") {
  const auto cubes = rank2_cubes(3, 6);
  const auto m = fit_background(cubes, 1, 0);
  const auto out = suppress_background(cubes[0], m);
  CHECK(out.amplitudes().minCoeff() == 0.0f);
  CHECK(out.amplitudes().maxCoeff() == 1.0f);
}
