#pragma once

#include <span>
#include <vector>

#include "radarcount/cube.hpp"

namespace radarcount {

/// Spatial average pooling per frame followed by temporal statistics per
/// pooled region. Regions tile the grid; the last region along each axis
/// absorbs the remainder. Feature index = stat * regions + region, with
/// stat 0 = mean, 1 = population std, 2 = max, and region = row * pool_cols + col.
struct FeatureExtractor {
  int pool_rows = 3;
  int pool_cols = 7;

  static constexpr int kStats = 3;

  int regions() const { return pool_rows * pool_cols; }
  int dim() const { return kStats * regions(); }

  /// [begin, end) of pooled band `i` out of `parts` over `n` bins.
  static std::pair<int, int> band(int n, int parts, int i);

  /// cells x regions averaging matrix for the given grid.
  Eigen::MatrixXd pooling_matrix(int range_bins, int azimuth_bins) const;

  Eigen::VectorXd operator()(const RadarCube& cube) const;
  /// One row per cube.
  Eigen::MatrixXd batch(std::span<const RadarCube> cubes) const;
};

}  // namespace radarcount
