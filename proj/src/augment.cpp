#include "radarcount/augment.hpp"

#include <random>
#include <stdexcept>

namespace radarcount {

RadarCube flip(const RadarCube& cube, FlipAxis axis) {
  const int R = cube.range_bins();
  const int A = cube.azimuth_bins();
  const bool flip_r = axis == FlipAxis::Range || axis == FlipAxis::Both;
  const bool flip_a = axis == FlipAxis::Azimuth || axis == FlipAxis::Both;
  RadarCube out(cube.frames(), R, A, cube.meta);
  for (int r = 0; r < R; ++r) {
    const int rs = flip_r ? R - 1 - r : r;
    for (int a = 0; a < A; ++a) {
      const int as = flip_a ? A - 1 - a : a;
      out.amplitudes().col(cube.cell_index(r, a)) = cube.amplitudes().col(cube.cell_index(rs, as));
    }
  }
  return out;
}

RadarCube scale(const RadarCube& cube, double k) {
  RadarCube out = cube;
  if (k != 1.0) out.amplitudes() = (cube.amplitudes().cast<double>() * k).cast<float>();
  out.meta.scale_factor = k;
  return out;
}

double draw_scale(std::uint64_t seed, double lo, double hi) {
  if (!(lo > 0.0 && lo <= hi)) throw std::invalid_argument("scale range must satisfy 0 < lo <= hi");
  if (lo == hi) return lo;
  std::mt19937_64 rng(seed);
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

RadarCube random_scale(const RadarCube& cube, std::uint64_t seed, double lo, double hi) {
  return scale(cube, draw_scale(seed, lo, hi));
}

std::array<int, 3> draw_drop_frames(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return {std::uniform_int_distribution<int>(1, 19)(rng), std::uniform_int_distribution<int>(20, 39)(rng),
          std::uniform_int_distribution<int>(40, 58)(rng)};
}

RadarCube interpolate_frames(const RadarCube& cube, const std::array<int, 3>& frames) {
  RadarCube out = cube;
  for (int t : frames) {
    if (t < 1 || t >= cube.frames() - 1) throw std::invalid_argument("interpolated frame needs two neighbours");
    // Neighbours come from the untouched input, so the order of replacement is irrelevant.
    out.amplitudes().row(t) =
        ((cube.amplitudes().row(t - 1).cast<double>() + cube.amplitudes().row(t + 1).cast<double>()) / 2.0)
            .cast<float>();
  }
  out.meta.dropped_frames.assign(frames.begin(), frames.end());
  return out;
}

RadarCube drop_and_interpolate(const RadarCube& cube, std::uint64_t seed) {
  if (cube.frames() != kFrames) {
    throw std::invalid_argument("drop_and_interpolate expects 60 frames, got " + std::to_string(cube.frames()));
  }
  return interpolate_frames(cube, draw_drop_frames(seed));
}

void AugmentSpec::validate() const {
  if (!(scale_lo > 0.0 && scale_lo <= scale_hi)) throw std::invalid_argument("scale range must satisfy 0 < lo <= hi");
  if (copies < 1) throw std::invalid_argument("copies must be >= 1");
}

AugmentSpec augment_spec_from_name(const std::string& name, std::uint64_t seed) {
  AugmentSpec spec;
  spec.seed = seed;
  if (name == "none") return spec;
  if (name == "flips" || name == "all") spec.flips = {FlipAxis::Azimuth, FlipAxis::Range, FlipAxis::Both};
  if (name == "scale" || name == "scaling" || name == "all") spec.scale = true;
  if (name == "framedrop" || name == "all") spec.frame_drop = true;
  if (spec.empty()) throw std::invalid_argument("unknown augmentation '" + name + "'");
  return spec;
}

std::vector<RadarCube> augment_cube(const RadarCube& cube, const AugmentSpec& spec, std::uint64_t index) {
  spec.validate();
  std::vector<RadarCube> out{cube};
  for (auto axis : spec.flips) out.push_back(flip(cube, axis));
  std::mt19937_64 rng(spec.seed ^ index);
  if (spec.scale && spec.scale_mode == ScaleMode::Once) {
    for (int c = 0; c < spec.copies; ++c) out.push_back(random_scale(cube, rng(), spec.scale_lo, spec.scale_hi));
  }
  if (spec.frame_drop) {
    for (int c = 0; c < spec.copies; ++c) out.push_back(drop_and_interpolate(cube, rng()));
  }
  return out;
}

}  // namespace radarcount
