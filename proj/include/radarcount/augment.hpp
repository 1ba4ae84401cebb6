#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "radarcount/cube.hpp"

namespace radarcount {

enum class FlipAxis { Azimuth, Range, Both };

/// Spatial reversal, identical for every frame.
RadarCube flip(const RadarCube& cube, FlipAxis axis);

/// Multiplies every amplitude by `k` and records it in meta.scale_factor.
RadarCube scale(const RadarCube& cube, double k);
double draw_scale(std::uint64_t seed, double lo = 0.95, double hi = 1.05);
RadarCube random_scale(const RadarCube& cube, std::uint64_t seed, double lo = 0.95, double hi = 1.05);

/// One frame index from each temporal third, excluding the first and last
/// frame: [1, 19], [20, 39], [40, 58].
std::array<int, 3> draw_drop_frames(std::uint64_t seed);
/// Replaces each listed frame by the mean of its original neighbours.
RadarCube interpolate_frames(const RadarCube& cube, const std::array<int, 3>& frames);
/// Requires exactly 60 frames.
RadarCube drop_and_interpolate(const RadarCube& cube, std::uint64_t seed);

enum class ScaleMode {
  Once,      // extra scaled copies added to the training set
  PerEpoch,  // every sample rescaled afresh each epoch
};

struct AugmentSpec {
  std::vector<FlipAxis> flips;
  bool scale = false;
  double scale_lo = 0.95;
  double scale_hi = 1.05;
  ScaleMode scale_mode = ScaleMode::Once;
  bool frame_drop = false;
  int copies = 3;  // scaled / frame-dropped variants per original
  std::uint64_t seed = 0;

  bool empty() const { return flips.empty() && !scale && !frame_drop; }
  void validate() const;
};

/// Parses "flips", "scale", "framedrop", "all" or "none".
AugmentSpec augment_spec_from_name(const std::string& name, std::uint64_t seed = 0);

/// The original followed by its augmented variants. Per-cube randomness uses
/// seed = spec.seed XOR index.
std::vector<RadarCube> augment_cube(const RadarCube& cube, const AugmentSpec& spec, std::uint64_t index);

}  // namespace radarcount
