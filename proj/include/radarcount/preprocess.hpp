#pragma once

#include <cmath>

#include "radarcount/cube.hpp"

namespace radarcount {

/// Per-cell population standard deviation over frames (divisor N).
struct StdMap {
  SpatialMap values;
};

/// Per-cell attenuation factors in [0, 1].
struct WeightMap {
  SpatialMap values;
};

struct SigmoidParams {
  double tau = 0.02;  // midpoint
  double s = 0.01;    // steepness
};

inline constexpr double kDefaultTau = 0.02;

StdMap std_map(const RadarCube& cube);

/// Zeroes every cell whose temporal std is <= tau (equality included).
RadarCube threshold_zero(const RadarCube& cube, double tau);

/// Logistic function evaluated without overflow for any finite argument.
template <typename Scalar>
Scalar stable_sigmoid(Scalar z) {
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

/// w = 1 / (1 + exp(-(sigma - tau) / s)).
WeightMap sigmoid_weight_map(const StdMap& sm, const SigmoidParams& p);

/// Multiplies each cell's full time series by its weight.
RadarCube apply_weight(const RadarCube& cube, const WeightMap& w);

}  // namespace radarcount
