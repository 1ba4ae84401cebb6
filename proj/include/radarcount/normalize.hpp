#pragma once

#include <utility>

#include "radarcount/cube.hpp"

namespace radarcount {

inline constexpr double kClipLowerPercentile = 0.1;
inline constexpr double kClipUpperPercentile = 99.9;

/// Order statistics used as clipping bounds: the lower bound is the sample at
/// rank floor(p/100 * (n-1)), the upper bound the sample at rank
/// ceil(q/100 * (n-1)). Both are actual sample values, which makes clipping
/// followed by min-max scaling idempotent.
std::pair<double, double> clip_bounds(const FrameMatrix& values, double lower_pct, double upper_pct);

/// Clips to the 0.1st/99.9th percentile bounds of this cube, then maps the
/// clipped range affinely onto [0, 1]. A cube that is constant after clipping
/// becomes all zeros with `degenerate` set.
std::pair<RadarCube, NormalizationParams> clip_and_normalize(const RadarCube& cube);

/// Plain affine min-max scaling onto [0, 1]; constant input maps to zeros.
template <typename Derived>
FrameMatrix minmax_to_unit(const Eigen::MatrixBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  const Scalar lo = values.minCoeff();
  const Scalar hi = values.maxCoeff();
  if (!(hi > lo)) return FrameMatrix::Zero(values.rows(), values.cols());
  return ((values.array() - lo) / (hi - lo)).matrix().template cast<float>();
}

}  // namespace radarcount
