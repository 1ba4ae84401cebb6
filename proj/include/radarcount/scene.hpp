#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "radarcount/cube.hpp"
#include "radarcount/dataset.hpp"

namespace radarcount {

struct ClutterCell {
  int range = 0;
  int azimuth = 0;
  double mean_amplitude = 0.0;
  bool leakage = false;  // direct TX-RX coupling; follows leakage_drift
};

/// Static scene description. Clutter cells are static reflectors whose
/// per-frame amplitude is mean * (1 + clutter_jitter * N(0,1)); the receiver
/// adds complex Gaussian noise of standard deviation `noise_floor` after the
/// sensor gain, so the observed amplitude is |gain * signal + noise|.
///
/// The remaining terms default to off:
/// - leakage cells drift with the transmitter. Each scene draws a depth
///   log-uniformly in [leakage_drift / 10, leakage_drift] and a rate in
///   [0.1, 0.5] Hz, and scales them by 1 + depth * sin(2 pi f t / fs + phi).
/// - leakage_sidelobe is a floor added to every cell that follows the same drift.
/// - multipath scales the other clutter by 1 + multipath * sum_i m_i(t), where
///   m_i is person i's relative envelope modulation.
/// - noise_spread draws a per-scene noise floor factor in [1 - spread, 1 + spread].
struct EnvironmentSpec {
  std::string name;
  std::vector<ClutterCell> clutter_cells;
  double clutter_jitter = 0.002;  // relative to each cell's mean amplitude
  double noise_floor = 0.028;
  double gain = 1.0;
  double leakage_drift = 0.0;
  double leakage_sidelobe = 0.0;
  double multipath = 0.0;
  double noise_spread = 0.0;

  void validate() const;
};

/// One occupant. Amplitude envelope over the Gaussian footprint is
///   peak * (1 + breathing_depth * sin(2 pi f_b t / fs + phi_b)
///             + motion_depth    * sin(2 pi f_m t / fs + phi_m)),
/// with the phases drawn from the scene seed. `motion_*` carries the faster
/// body movements (cardiac, gait) and defaults to off.
struct PersonSpec {
  double range_center = 6.0;
  double azimuth_center = 45.0;
  double range_extent = 0.8;
  double azimuth_extent = 3.0;
  double peak_amplitude = 0.4;
  double breathing_freq = 0.3;
  double breathing_depth = 0.1;
  double motion_freq = 0.0;
  double motion_depth = 0.0;
  double walk_speed = 0.0;  // range bins per frame; 0 = standing
  std::uint64_t path_seed = 0;

  void validate(int range_bins, int azimuth_bins) const;
};

struct SceneConfig {
  EnvironmentSpec env;
  std::vector<PersonSpec> persons;
  int frames = kFrames;
  int range_bins = kRangeBins;
  int azimuth_bins = kAzimuthBins;
  double sample_rate = kSampleRateHz;
  std::uint64_t seed = 0;
  // Metadata copied onto the generated cube.
  Environment environment = Environment::Synthetic;
  std::uint32_t layout = 0;

  void validate() const;
};

/// Azimuth bins travelled per range bin of walking displacement.
inline constexpr double kAzimuthPerRangeStep = 4.0;

/// Raw (un-normalized) amplitudes. Deterministic in `cfg`.
RadarCube generate_cube(const SceneConfig& cfg);

/// Trajectory of person `index` (frames x 2: range, azimuth), as used by
/// generate_cube.
Eigen::MatrixX2d person_trajectory(const SceneConfig& cfg, std::size_t index);

struct EnvironmentSuite {
  std::vector<SceneConfig> a;           // layout-varied intra-layout environment
  std::vector<SceneConfig> b;           // same room and sensor, new furniture layout
  std::vector<SceneConfig> c;           // different room, gain and noise
  std::vector<SceneConfig> a_background;  // extra 0-person scenes of A (background model fitting)
};

/// Number of furniture layouts in the A analog.
inline constexpr int kSuiteLayoutsA = 4;

EnvironmentSpec suite_environment_a(std::uint64_t seed, int layout);
EnvironmentSpec suite_environment_b(std::uint64_t seed);
EnvironmentSpec suite_environment_c(std::uint64_t seed);

/// Scene configurations for the three synthetic environments, `n_per_class`
/// scenes for each label 0..3, cycling through activities (and layouts in A).
EnvironmentSuite make_environment_suite_configs(std::uint64_t seed, int n_per_class, int n_background = 0);

struct EnvironmentDatasets {
  Dataset a, b, c;
};
EnvironmentDatasets make_environment_suite(std::uint64_t seed, int n_per_class);

/// Each load() re-simulates the scene and applies clip_and_normalize.
CubeSource source_from_scenes(std::vector<SceneConfig> scenes);

void to_json(nlohmann::json& j, const ClutterCell& c);
void from_json(const nlohmann::json& j, ClutterCell& c);
void to_json(nlohmann::json& j, const EnvironmentSpec& e);
void from_json(const nlohmann::json& j, EnvironmentSpec& e);
void to_json(nlohmann::json& j, const PersonSpec& p);
void from_json(const nlohmann::json& j, PersonSpec& p);
void to_json(nlohmann::json& j, const SceneConfig& s);
void from_json(const nlohmann::json& j, SceneConfig& s);

}  // namespace radarcount
