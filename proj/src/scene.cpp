#include "radarcount/scene.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>

#include "radarcount/normalize.hpp"

namespace radarcount {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double reflect_into(double x, double hi) {
  // Reflect at the borders of [0, hi] until inside.
  if (hi <= 0.0) return 0.0;
  while (x < 0.0 || x > hi) {
    if (x < 0.0) x = -x;
    if (x > hi) x = 2.0 * hi - x;
  }
  return x;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finaliser
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

void EnvironmentSpec::validate() const {
  for (const auto& c : clutter_cells) {
    if (!(c.mean_amplitude >= 0.0)) throw std::invalid_argument("clutter mean_amplitude must be >= 0");
  }
  if (!(clutter_jitter >= 0.0)) throw std::invalid_argument("clutter_jitter must be >= 0");
  if (!(noise_floor >= 0.0)) throw std::invalid_argument("noise_floor must be >= 0");
  if (!(gain > 0.0)) throw std::invalid_argument("gain must be > 0");
  if (!(leakage_sidelobe >= 0.0)) throw std::invalid_argument("leakage_sidelobe must be >= 0");
  if (!(multipath >= 0.0)) throw std::invalid_argument("multipath must be >= 0");
  if (!(noise_spread >= 0.0 && noise_spread < 1.0)) throw std::invalid_argument("noise_spread must lie in [0, 1)");
  if (!(leakage_drift >= 0.0 && leakage_drift < 1.0)) throw std::invalid_argument("leakage_drift must lie in [0, 1)");
}

void PersonSpec::validate(int range_bins, int azimuth_bins) const {
  if (!(range_center >= 0.0 && range_center <= range_bins - 1 && azimuth_center >= 0.0 &&
        azimuth_center <= azimuth_bins - 1)) {
    throw std::invalid_argument("person center outside the grid");
  }
  if (!(range_extent > 0.0 && azimuth_extent > 0.0)) throw std::invalid_argument("person extent must be > 0");
  if (!(breathing_freq >= 0.2 && breathing_freq <= 0.5)) {
    throw std::invalid_argument("breathing_freq must lie in the respiration band [0.2, 0.5] Hz");
  }
  if (!(breathing_depth >= 0.0 && motion_depth >= 0.0 && motion_freq >= 0.0)) {
    throw std::invalid_argument("modulation depths and frequencies must be >= 0");
  }
  if (!(walk_speed >= 0.0)) throw std::invalid_argument("walk_speed must be >= 0");
}

void SceneConfig::validate() const {
  env.validate();
  if (persons.size() > static_cast<std::size_t>(kMaxPersons)) throw std::invalid_argument("at most 3 persons");
  if (frames < 3) throw std::invalid_argument("frames must be >= 3");
  if (range_bins < 1 || azimuth_bins < 1) throw std::invalid_argument("grid must be non-empty");
  double max_freq = 0.0;
  for (const auto& p : persons) {
    p.validate(range_bins, azimuth_bins);
    max_freq = std::max({max_freq, p.breathing_freq, p.motion_freq});
  }
  if (!(sample_rate > 2.0 * max_freq)) throw std::invalid_argument("sample_rate must exceed twice the highest modulation");
  for (const auto& c : env.clutter_cells) {
    if (c.range < 0 || c.range >= range_bins || c.azimuth < 0 || c.azimuth >= azimuth_bins) {
      throw std::invalid_argument("clutter cell outside the grid");
    }
  }
}

Eigen::MatrixX2d person_trajectory(const SceneConfig& cfg, std::size_t index) {
  const auto& p = cfg.persons.at(index);
  Eigen::MatrixX2d path(cfg.frames, 2);
  double r = p.range_center;
  double a = p.azimuth_center;
  std::mt19937_64 rng(p.path_seed);
  std::uniform_real_distribution<double> uni(0.0, kTwoPi);
  std::normal_distribution<double> turn(0.0, 0.6);
  double heading = uni(rng);
  for (int t = 0; t < cfg.frames; ++t) {
    if (t > 0 && p.walk_speed > 0.0) {
      heading += turn(rng);
      r = reflect_into(r + p.walk_speed * std::cos(heading), cfg.range_bins - 1);
      a = reflect_into(a + p.walk_speed * kAzimuthPerRangeStep * std::sin(heading), cfg.azimuth_bins - 1);
    }
    path(t, 0) = r;
    path(t, 1) = a;
  }
  return path;
}

RadarCube generate_cube(const SceneConfig& cfg) {
  cfg.validate();
  const int R = cfg.range_bins;
  const int A = cfg.azimuth_bins;
  const auto& env = cfg.env;

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::normal_distribution<double> gauss(0.0, 1.0);

  struct Track {
    Eigen::MatrixX2d path;
    double phi_breath, phi_motion;
  };
  std::vector<Track> tracks;
  for (std::size_t i = 0; i < cfg.persons.size(); ++i) {
    const double pb = phase(rng);
    const double pm = phase(rng);
    tracks.push_back({person_trajectory(cfg, i), pb, pm});
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double drift_depth = env.leakage_drift * std::pow(10.0, -unit(rng));
  const double drift_freq = 0.1 + 0.4 * unit(rng);
  const double drift_phase = phase(rng);

  SampleMeta meta;
  meta.label = static_cast<int>(cfg.persons.size());
  meta.environment = cfg.environment;
  meta.layout = cfg.layout;
  meta.seed = cfg.seed;
  std::size_t walkers = 0;
  for (const auto& p : cfg.persons) walkers += p.walk_speed > 0.0 ? 1 : 0;
  meta.activity = walkers == 0 ? Activity::Standing
                               : (walkers == cfg.persons.size() ? Activity::Walking : Activity::Mixed);

  RadarCube cube(cfg.frames, R, A, meta);
  const Eigen::ArrayXd range_idx = Eigen::ArrayXd::LinSpaced(R, 0.0, R - 1.0);
  const Eigen::ArrayXd az_idx = Eigen::ArrayXd::LinSpaced(A, 0.0, A - 1.0);
  const double noise_sd = env.noise_floor * (1.0 + env.noise_spread * (2.0 * unit(rng) - 1.0)) / std::numbers::sqrt2;

  SpatialMap signal(R, A);
  for (int t = 0; t < cfg.frames; ++t) {
    signal.setConstant(env.leakage_sidelobe);
    const double leak = drift_depth * std::sin(kTwoPi * drift_freq * t / cfg.sample_rate + drift_phase);
    signal *= 1.0 + leak;
    const double time = t / cfg.sample_rate;
    double coupled = 0.0;
    for (std::size_t i = 0; i < cfg.persons.size(); ++i) {
      const auto& p = cfg.persons[i];
      const auto& tr = tracks[i];
      const double m = p.breathing_depth * std::sin(kTwoPi * p.breathing_freq * time + tr.phi_breath) +
                       p.motion_depth * std::sin(kTwoPi * p.motion_freq * time + tr.phi_motion);
      coupled += m;
      const Eigen::ArrayXd gr = (-(range_idx - tr.path(t, 0)).square() / (2.0 * p.range_extent * p.range_extent)).exp();
      const Eigen::ArrayXd ga = (-(az_idx - tr.path(t, 1)).square() / (2.0 * p.azimuth_extent * p.azimuth_extent)).exp();
      signal += p.peak_amplitude * (1.0 + m) * (gr.matrix() * ga.matrix().transpose()).array();
    }
    for (const auto& c : env.clutter_cells) {
      const double mod = c.leakage ? leak : env.multipath * coupled;
      signal(c.range, c.azimuth) += c.mean_amplitude * (1.0 + mod + env.clutter_jitter * gauss(rng));
    }
    auto row = cube.amplitudes().row(t);
    for (int k = 0; k < R * A; ++k) {
      const double s = env.gain * signal(k / A, k % A);
      if (noise_sd > 0.0) {
        const double re = s + noise_sd * gauss(rng);
        const double im = noise_sd * gauss(rng);
        row(k) = static_cast<float>(std::hypot(re, im));
      } else {
        row(k) = static_cast<float>(std::abs(s));
      }
    }
  }
  return cube;
}

// --- synthetic environment suite -------------------------------------------

namespace {

struct Furniture {
  int range, azimuth, range_len, az_len;
  double amplitude;
};

void add_furniture(EnvironmentSpec& env, const Furniture& f) {
  for (int dr = 0; dr < f.range_len; ++dr) {
    for (int da = 0; da < f.az_len; ++da) {
      const int r = f.range + dr, a = f.azimuth + da;
      if (r < 0 || r >= kRangeBins || a < 0 || a >= kAzimuthBins) continue;
      // Edges of an object reflect less than its centre.
      const double taper = (dr == 0 || dr == f.range_len - 1 ? 0.8 : 1.0) * (da == 0 || da == f.az_len - 1 ? 0.8 : 1.0);
      env.clutter_cells.push_back({r, a, f.amplitude * taper});
    }
  }
}

// Near-range leakage and far wall shared by both rooms; amplitudes differ by room.
void add_room(EnvironmentSpec& env, double leakage, double wall, int wall_range) {
  for (int a = 0; a < kAzimuthBins; ++a) {
    const double u = (a - 45.0) / 45.0;
    env.clutter_cells.push_back({0, a, leakage * (0.85 + 0.15 * std::cos(std::numbers::pi * u)), true});
    env.clutter_cells.push_back({1, a, 0.35 * leakage * (0.7 + 0.3 * std::cos(std::numbers::pi * u)), true});
    if (wall > 0.0) env.clutter_cells.push_back({wall_range, a, wall * (0.75 + 0.25 * std::cos(3.0 * std::numbers::pi * u))});
  }
}

EnvironmentSpec base_room(const std::string& name) {
  EnvironmentSpec env;
  env.name = name;
  env.clutter_jitter = 0.002;
  env.noise_floor = 0.014;
  env.noise_spread = 0.5;
  env.multipath = 0.5;
  env.gain = 1.0;
  env.leakage_drift = 0.5;
  env.leakage_sidelobe = 0.1;
  add_room(env, 1.0, 0.0, 0);
  return env;
}

Furniture chair_at(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> r(2, 10), a(8, 80);
  return {r(rng), a(rng), 1, 3, 0.08};
}

}  // namespace

EnvironmentSpec suite_environment_a(std::uint64_t seed, int layout) {
  EnvironmentSpec env = base_room("A'");
  switch (layout) {
    case 0:  // empty
      break;
    case 1: {  // 1-4 chairs at random positions
      std::mt19937_64 rng(mix_seed(seed, 11));
      const int n = std::uniform_int_distribution<int>(1, 4)(rng);
      for (int i = 0; i < n; ++i) add_furniture(env, chair_at(rng));
      break;
    }
    case 2:  // two desks
      add_furniture(env, {4, 16, 3, 12, 0.14});
      add_furniture(env, {4, 60, 3, 12, 0.14});
      break;
    case 3:  // whiteboard
      add_furniture(env, {9, 30, 2, 24, 0.18});
      break;
    default:
      throw std::invalid_argument("A' layout must be in [0, 3]");
  }
  return env;
}

EnvironmentSpec suite_environment_b(std::uint64_t /*seed*/) {
  EnvironmentSpec env = base_room("B'");
  add_furniture(env, {3, 12, 1, 3, 0.08});
  add_furniture(env, {5, 44, 1, 3, 0.08});
  add_furniture(env, {8, 70, 1, 3, 0.08});
  add_furniture(env, {6, 22, 3, 12, 0.14});
  add_furniture(env, {7, 54, 3, 12, 0.14});
  add_furniture(env, {10, 36, 2, 24, 0.18});
  return env;
}

EnvironmentSpec suite_environment_c(std::uint64_t seed) {
  EnvironmentSpec env;
  env.name = "C'";
  env.clutter_jitter = 0.002;
  env.noise_floor = 0.03;
  env.noise_spread = 0.5;
  env.multipath = 0.5;
  env.gain = 0.75;
  env.leakage_drift = 0.5;
  env.leakage_sidelobe = 0.1;
  add_room(env, 0.8, 0.5, 11);
  std::mt19937_64 rng(mix_seed(seed, 33));
  std::uniform_int_distribution<int> r(2, 10), a(5, 80), len(2, 8);
  std::uniform_real_distribution<double> amp(0.2, 0.6);
  for (int i = 0; i < 12; ++i) add_furniture(env, {r(rng), a(rng), 1 + (i % 2), len(rng), amp(rng)});
  return env;
}

namespace {

PersonSpec draw_person(std::mt19937_64& rng, bool walking) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * U(rng); };
  PersonSpec p;
  p.range_center = uni(2.0, 10.0);
  p.azimuth_center = uni(12.0, 78.0);
  p.range_extent = uni(0.7, 0.9);
  p.azimuth_extent = uni(2.8, 3.5);
  p.peak_amplitude = uni(0.35, 0.45);
  p.breathing_freq = uni(0.2, 0.5);
  // Chest motion barely moves the amplitude; body sway and gait dominate.
  p.breathing_depth = uni(0.005, 0.015);
  if (walking) {
    p.walk_speed = uni(0.2, 0.4);
    p.motion_freq = uni(1.0, 3.0);  // gait
    p.motion_depth = uni(0.2, 0.35);
  } else {
    p.motion_freq = uni(1.0, 2.0);  // cardiac and postural micro-motion
    p.motion_depth = uni(0.15, 0.3);
  }
  p.path_seed = rng();
  return p;
}

std::vector<PersonSpec> draw_persons(std::mt19937_64& rng, int count, Activity activity) {
  std::vector<PersonSpec> persons;
  for (int i = 0; i < count; ++i) {
    bool walking = activity == Activity::Walking;
    if (activity == Activity::Mixed) walking = count == 1 ? (rng() & 1) != 0 : (i % 2 == 0);
    persons.push_back(draw_person(rng, walking));
  }
  return persons;
}

std::vector<SceneConfig> scenes_for(std::uint64_t seed, int n_per_class, Environment tag,
                                    const std::function<EnvironmentSpec(int index, int& layout)>& env_for) {
  std::vector<SceneConfig> out;
  std::mt19937_64 rng(seed);
  int index = 0;
  for (int label = 0; label <= kMaxPersons; ++label) {
    for (int i = 0; i < n_per_class; ++i, ++index) {
      SceneConfig cfg;
      int layout = 0;
      cfg.env = env_for(index, layout);
      cfg.layout = static_cast<std::uint32_t>(layout);
      cfg.environment = tag;
      const auto activity = static_cast<Activity>(i % 3);
      cfg.persons = draw_persons(rng, label, activity);
      cfg.seed = rng();
      out.push_back(std::move(cfg));
    }
  }
  return out;
}

}  // namespace

EnvironmentSuite make_environment_suite_configs(std::uint64_t seed, int n_per_class, int n_background) {
  if (n_per_class < 1) throw std::invalid_argument("n_per_class must be >= 1");
  EnvironmentSuite suite;
  // Layout 1 (random chairs) is re-drawn per scene.
  auto env_a = [seed](int index, int& layout) {
    layout = index % kSuiteLayoutsA;
    return suite_environment_a(layout == 1 ? mix_seed(seed, 1000 + index) : seed, layout);
  };
  const auto env_b = suite_environment_b(seed);
  const auto env_c = suite_environment_c(seed);
  suite.a = scenes_for(mix_seed(seed, 1), n_per_class, Environment::A, env_a);
  suite.b = scenes_for(mix_seed(seed, 2), n_per_class, Environment::B, [&](int, int& layout) {
    layout = kSuiteLayoutsA;
    return env_b;
  });
  suite.c = scenes_for(mix_seed(seed, 3), n_per_class, Environment::C, [&](int, int& layout) {
    layout = kSuiteLayoutsA + 1;
    return env_c;
  });
  if (n_background > 0) {
    std::mt19937_64 rng(mix_seed(seed, 4));
    for (int i = 0; i < n_background; ++i) {
      SceneConfig cfg;
      int layout = 0;
      cfg.env = env_a(1'000'000 + i, layout);
      cfg.layout = static_cast<std::uint32_t>(layout);
      cfg.environment = Environment::A;
      cfg.seed = rng();
      suite.a_background.push_back(std::move(cfg));
    }
  }
  return suite;
}

EnvironmentDatasets make_environment_suite(std::uint64_t seed, int n_per_class) {
  const auto suite = make_environment_suite_configs(seed, n_per_class);
  auto build = [](const std::vector<SceneConfig>& scenes) {
    Dataset ds;
    for (const auto& s : scenes) ds.cubes.push_back(clip_and_normalize(generate_cube(s)).first);
    return ds;
  };
  return {build(suite.a), build(suite.b), build(suite.c)};
}

CubeSource source_from_scenes(std::vector<SceneConfig> scenes) {
  auto shared = std::make_shared<const std::vector<SceneConfig>>(std::move(scenes));
  CubeSource src;
  for (const auto& s : *shared) {
    SampleMeta m;
    m.label = static_cast<int>(s.persons.size());
    m.environment = s.environment;
    m.layout = s.layout;
    m.seed = s.seed;
    std::size_t walkers = 0;
    for (const auto& p : s.persons) walkers += p.walk_speed > 0.0 ? 1 : 0;
    m.activity = walkers == 0 ? Activity::Standing : (walkers == s.persons.size() ? Activity::Walking : Activity::Mixed);
    src.meta.push_back(m);
  }
  src.load = [shared](std::size_t i) { return clip_and_normalize(generate_cube(shared->at(i))).first; };
  return src;
}

// --- JSON --------------------------------------------------------------------

void to_json(nlohmann::json& j, const ClutterCell& c) {
  j = nlohmann::json::array({c.range, c.azimuth, c.mean_amplitude});
  if (c.leakage) j.push_back(true);
}

void from_json(const nlohmann::json& j, ClutterCell& c) {
  if (j.is_array()) {
    c.range = j.at(0).get<int>();
    c.azimuth = j.at(1).get<int>();
    c.mean_amplitude = j.at(2).get<double>();
    c.leakage = j.size() > 3 && j.at(3).get<bool>();
  } else {
    c.range = j.at("range").get<int>();
    c.azimuth = j.at("azimuth").get<int>();
    c.mean_amplitude = j.at("mean_amplitude").get<double>();
    c.leakage = j.value("leakage", false);
  }
}

void to_json(nlohmann::json& j, const EnvironmentSpec& e) {
  j = {{"name", e.name},
       {"clutter_cells", e.clutter_cells},
       {"clutter_jitter", e.clutter_jitter},
       {"noise_floor", e.noise_floor},
       {"gain", e.gain},
       {"leakage_drift", e.leakage_drift},
       {"noise_spread", e.noise_spread},
       {"multipath", e.multipath},
       {"leakage_sidelobe", e.leakage_sidelobe}};
}

void from_json(const nlohmann::json& j, EnvironmentSpec& e) {
  e.name = j.at("name").get<std::string>();
  e.clutter_cells = j.at("clutter_cells").get<std::vector<ClutterCell>>();
  e.clutter_jitter = j.at("clutter_jitter").get<double>();
  e.noise_floor = j.at("noise_floor").get<double>();
  e.gain = j.at("gain").get<double>();
  e.leakage_drift = j.value("leakage_drift", 0.0);
  e.noise_spread = j.value("noise_spread", 0.0);
  e.multipath = j.value("multipath", 0.0);
  e.leakage_sidelobe = j.value("leakage_sidelobe", 0.0);
}

void to_json(nlohmann::json& j, const PersonSpec& p) {
  j = {{"center", {p.range_center, p.azimuth_center}},
       {"extent", {p.range_extent, p.azimuth_extent}},
       {"peak_amplitude", p.peak_amplitude},
       {"breathing_freq", p.breathing_freq},
       {"breathing_depth", p.breathing_depth},
       {"motion_freq", p.motion_freq},
       {"motion_depth", p.motion_depth},
       {"walk_speed", p.walk_speed},
       {"path_seed", p.path_seed}};
}

void from_json(const nlohmann::json& j, PersonSpec& p) {
  const auto& center = j.at("center");
  p.range_center = center.at(0).get<double>();
  p.azimuth_center = center.at(1).get<double>();
  const auto& extent = j.at("extent");
  p.range_extent = extent.at(0).get<double>();
  p.azimuth_extent = extent.at(1).get<double>();
  p.peak_amplitude = j.at("peak_amplitude").get<double>();
  p.breathing_freq = j.at("breathing_freq").get<double>();
  p.breathing_depth = j.at("breathing_depth").get<double>();
  p.motion_freq = j.value("motion_freq", 0.0);
  p.motion_depth = j.value("motion_depth", 0.0);
  p.walk_speed = j.at("walk_speed").get<double>();
  p.path_seed = j.value("path_seed", std::uint64_t{0});
}

void to_json(nlohmann::json& j, const SceneConfig& s) {
  j = {{"env", s.env},
       {"persons", s.persons},
       {"frames", s.frames},
       {"sample_rate", s.sample_rate},
       {"seed", s.seed},
       {"environment", to_string(s.environment)},
       {"layout", s.layout}};
}

void from_json(const nlohmann::json& j, SceneConfig& s) {
  s.env = j.at("env").get<EnvironmentSpec>();
  s.persons = j.at("persons").get<std::vector<PersonSpec>>();
  s.frames = j.at("frames").get<int>();
  s.sample_rate = j.at("sample_rate").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.environment = environment_from_string(j.value("environment", std::string{"synthetic"}));
  s.layout = j.value("layout", 0u);
}

}  // namespace radarcount
