#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "radarcount/preprocess.hpp"
#include "radarcount/scene.hpp"

using namespace radarcount;

namespace {

SceneConfig quiet_scene() {
  SceneConfig cfg;
  cfg.env.name = "quiet";
  cfg.env.noise_floor = 0.0;
  cfg.env.clutter_jitter = 0.0;
  return cfg;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("empty scene without noise or jitter has zero temporal std everywhere") {
  auto cfg = quiet_scene();
  cfg.env.clutter_cells = {{3, 10, 0.5}, {7, 80, 0.2}, {0, 0, 1.0}};
  const auto sm = std_map(generate_cube(cfg));
  CHECK(sm.values.maxCoeff() == 0.0);
}

TEST_CASE("standing person: blob centre follows the closed-form breathing envelope") {
  auto cfg = quiet_scene();
  PersonSpec p;
  p.range_center = 6.0;
  p.azimuth_center = 45.0;
  p.peak_amplitude = 0.4;
  p.breathing_freq = 0.3;
  p.breathing_depth = 0.1;
  cfg.persons = {p};
  cfg.seed = 77;
  const auto cube = generate_cube(cfg);

  // Fit x_t = c0 + c1 sin(wt) + c2 cos(wt) and rebuild the envelope from it.
  const double w = 2.0 * std::numbers::pi * p.breathing_freq / cfg.sample_rate;
  Eigen::MatrixXd basis(cfg.frames, 3);
  Eigen::VectorXd x(cfg.frames);
  for (int t = 0; t < cfg.frames; ++t) {
    basis.row(t) << 1.0, std::sin(w * t), std::cos(w * t);
    x(t) = cube.at(t, 6, 45);
  }
  const Eigen::Vector3d c = basis.colPivHouseholderQr().solve(x);
  CHECK(c(0) == doctest::Approx(p.peak_amplitude).epsilon(1e-6));
  CHECK(std::hypot(c(1), c(2)) == doctest::Approx(p.peak_amplitude * p.breathing_depth).epsilon(1e-5));
  const double phi = std::atan2(c(2), c(1));

  std::vector<double> env(cfg.frames);
  for (int t = 0; t < cfg.frames; ++t) {
    env[t] = p.peak_amplitude * (1.0 + p.breathing_depth * std::sin(w * t + phi));
    CHECK(x(t) == doctest::Approx(env[t]).epsilon(1e-6));
  }
  double mean = 0.0;
  for (double e : env) mean += e / cfg.frames;
  double ss = 0.0;
  for (double e : env) ss += (e - mean) * (e - mean);
  const double oracle = std::sqrt(ss / cfg.frames);

  const auto sm = std_map(cube);
  CHECK(sm.values(6, 45) > 0.0);
  CHECK(sm.values(6, 45) == doctest::Approx(oracle).epsilon(1e-5));
  // The centre is the most fluctuating cell of a lone standing person.
  Eigen::Index r, a;
  sm.values.maxCoeff(&r, &a);
  CHECK(r == 6);
  CHECK(a == 45);
}

TEST_CASE("generation is a pure function of the config") {
  const auto suite = make_environment_suite_configs(3, 2);
  for (const auto& cfg : {suite.a[5], suite.b[7], suite.c[2]}) {
    CHECK(generate_cube(cfg) == generate_cube(cfg));
    auto other = cfg;
    other.seed ^= 1;
    CHECK_FALSE(generate_cube(other).amplitudes() == generate_cube(cfg).amplitudes());
  }
}

TEST_CASE("label and activity metadata follow the persons") {
  auto cfg = quiet_scene();
  CHECK(generate_cube(cfg).meta.label == 0);
  PersonSpec standing, walking;
  walking.walk_speed = 0.3;
  cfg.persons = {standing, walking};
  const auto c = generate_cube(cfg);
  CHECK(c.meta.label == 2);
  CHECK(c.meta.activity == Activity::Mixed);
  CHECK(c.frames() == 60);
  CHECK(c.range_bins() == 12);
  CHECK(c.azimuth_bins() == 91);
}

TEST_CASE("walking stays on the grid and moves") {
  SceneConfig cfg;
  PersonSpec p;
  p.range_center = 0.5;
  p.azimuth_center = 89.0;
  p.walk_speed = 0.8;
  p.path_seed = 4;
  cfg.persons = {p};
  const auto path = person_trajectory(cfg, 0);
  CHECK(path.col(0).minCoeff() >= 0.0);
  CHECK(path.col(0).maxCoeff() <= 11.0);
  CHECK(path.col(1).minCoeff() >= 0.0);
  CHECK(path.col(1).maxCoeff() <= 90.0);
  CHECK((path.row(59) - path.row(0)).norm() > 0.0);
}

TEST_CASE("invalid scenes are rejected") {
  SceneConfig cfg;
  PersonSpec p;
  p.range_center = 12.5;
  cfg.persons = {p};
  CHECK_THROWS(generate_cube(cfg));

  cfg.persons = {PersonSpec{}, PersonSpec{}, PersonSpec{}, PersonSpec{}};
  CHECK_THROWS(generate_cube(cfg));

  PersonSpec fast;
  fast.breathing_freq = 0.9;
  cfg.persons = {fast};
  CHECK_THROWS(generate_cube(cfg));

  cfg.persons = {};
  cfg.env.gain = 0.0;
  CHECK_THROWS(generate_cube(cfg));
}

TEST_CASE("fluctuation grows with occupant count on clutter-free scenes") {
  // Median std of the 100 most fluctuating cells, median over 40 scenes per count.
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> level;
  for (int count = 0; count <= 3; ++count) {
    std::vector<double> per_scene;
    for (int s = 0; s < 40; ++s) {
      SceneConfig cfg;
      cfg.env.name = "free";
      cfg.env.noise_floor = 0.014;
      cfg.seed = rng();
      for (int i = 0; i < count; ++i) {
        PersonSpec p;
        p.range_center = 2.0 + 8.0 * u(rng);
        p.azimuth_center = 12.0 + 66.0 * u(rng);
        p.breathing_freq = 0.2 + 0.3 * u(rng);
        p.breathing_depth = 0.01;
        p.motion_freq = 1.0 + u(rng);
        p.motion_depth = 0.2;
        p.walk_speed = (s % 2) ? 0.3 : 0.0;
        p.path_seed = rng();
        cfg.persons.push_back(p);
      }
      const auto sm = std_map(generate_cube(cfg));
      std::vector<double> v(sm.values.data(), sm.values.data() + sm.values.size());
      std::partial_sort(v.begin(), v.begin() + 100, v.end(), std::greater<>());
      v.resize(100);
      per_scene.push_back(median(v));
    }
    level.push_back(median(per_scene));
  }
  for (int k = 1; k <= 3; ++k) CHECK(level[k] > level[k - 1]);
}

TEST_CASE("suite sizes and label balance") {
  const auto suite = make_environment_suite_configs(1, 25, 7);
  CHECK(suite.a.size() == 100);
  CHECK(suite.b.size() == 100);
  CHECK(suite.c.size() == 100);
  CHECK(suite.a_background.size() == 7);
  for (const auto* env : {&suite.a, &suite.b, &suite.c}) {
    int per[4] = {};
    int walkers = 0;
    for (const auto& s : *env) {
      per[s.persons.size()]++;
      for (const auto& p : s.persons) walkers += p.walk_speed > 0.0;
    }
    for (int k = 0; k < 4; ++k) CHECK(per[k] == 25);
    CHECK(walkers > 0);
  }
  for (const auto& s : suite.a_background) CHECK(s.persons.empty());
  CHECK_THROWS(make_environment_suite_configs(1, 0));
}

TEST_CASE("A' and B' differ only in their clutter layout") {
  const auto b = suite_environment_b(5);
  for (int layout = 0; layout < kSuiteLayoutsA; ++layout) {
    const auto a = suite_environment_a(5, layout);
    CHECK(a.clutter_jitter == b.clutter_jitter);
    CHECK(a.noise_floor == b.noise_floor);
    CHECK(a.noise_spread == b.noise_spread);
    CHECK(a.gain == b.gain);
    CHECK(a.leakage_drift == b.leakage_drift);
    CHECK(a.leakage_sidelobe == b.leakage_sidelobe);
    CHECK(a.multipath == b.multipath);
    const bool same_cells = a.clutter_cells.size() == b.clutter_cells.size();
    CHECK_FALSE(same_cells);
  }
  const auto c = suite_environment_c(5);
  CHECK(c.gain != b.gain);
  CHECK(c.noise_floor != b.noise_floor);
  CHECK(c.clutter_cells.size() > b.clutter_cells.size());
}

TEST_CASE("C' empty-room amplitude differs from A' beyond three standard errors") {
  const auto suite = make_environment_suite_configs(8, 30);
  auto stats = [](const std::vector<SceneConfig>& scenes) {
    std::vector<double> m;
    for (const auto& s : scenes) {
      if (s.persons.empty()) m.push_back(generate_cube(s).amplitudes().cast<double>().mean());
    }
    double mean = 0.0;
    for (double v : m) mean += v / m.size();
    double var = 0.0;
    for (double v : m) var += (v - mean) * (v - mean) / (m.size() - 1);
    return std::pair{mean, std::sqrt(var / m.size())};
  };
  const auto [ma, sa] = stats(suite.a);
  const auto [mc, sc] = stats(suite.c);
  CHECK(std::abs(mc - ma) > 3.0 * std::hypot(sa, sc));
}

TEST_CASE("scene config JSON round trip") {
  const auto suite = make_environment_suite_configs(2, 1);
  const auto& cfg = suite.c[3];
  const nlohmann::json j = cfg;
  const auto back = j.get<SceneConfig>();
  CHECK(generate_cube(back) == generate_cube(cfg));

  const auto cell = nlohmann::json::parse(R"({"range": 2, "azimuth": 5, "mean_amplitude": 0.3, "leakage": true})")
                        .get<ClutterCell>();
  CHECK(cell.range == 2);
  CHECK(cell.leakage);
}
