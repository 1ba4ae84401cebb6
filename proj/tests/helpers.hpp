#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "radarcount/cube.hpp"

namespace testutil {

inline radarcount::RadarCube random_cube(std::uint64_t seed, int frames = 60, int range = 12, int azimuth = 91,
                                         float lo = 0.0f, float hi = 1.0f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(lo, hi);
  radarcount::RadarCube c(frames, range, azimuth);
  for (int t = 0; t < frames; ++t)
    for (int r = 0; r < range; ++r)
      for (int a = 0; a < azimuth; ++a) c.at(t, r, a) = u(rng);
  return c;
}

// Two-pass population std of one cell, the naive way.
inline double naive_std(const radarcount::RadarCube& c, int r, int a) {
  double mean = 0.0;
  for (int t = 0; t < c.frames(); ++t) mean += c.at(t, r, a);
  mean /= c.frames();
  double ss = 0.0;
  for (int t = 0; t < c.frames(); ++t) ss += (c.at(t, r, a) - mean) * (c.at(t, r, a) - mean);
  return std::sqrt(ss / c.frames());
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("radarcount_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
