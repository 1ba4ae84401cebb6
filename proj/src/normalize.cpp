#include "radarcount/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace radarcount {

std::pair<double, double> clip_bounds(const FrameMatrix& values, double lower_pct, double upper_pct) {
  const auto n = static_cast<std::size_t>(values.size());
  if (n == 0) throw std::invalid_argument("clip_bounds: empty input");
  std::vector<float> sorted(values.data(), values.data() + n);
  const double last = static_cast<double>(n - 1);
  const auto lo_rank = static_cast<std::size_t>(std::floor(lower_pct / 100.0 * last));
  const auto hi_rank = static_cast<std::size_t>(std::ceil(upper_pct / 100.0 * last - 1e-9));
  std::nth_element(sorted.begin(), sorted.begin() + lo_rank, sorted.end());
  const double lo = sorted[lo_rank];
  std::nth_element(sorted.begin() + lo_rank, sorted.begin() + hi_rank, sorted.end());
  const double hi = sorted[hi_rank];
  return {lo, hi};
}

std::pair<RadarCube, NormalizationParams> clip_and_normalize(const RadarCube& cube) {
  const auto& x = cube.amplitudes();
  if (!x.allFinite()) throw std::invalid_argument("clip_and_normalize: non-finite amplitude");

  NormalizationParams params;
  std::tie(params.clip_lo, params.clip_hi) = clip_bounds(x, kClipLowerPercentile, kClipUpperPercentile);
  params.min = params.clip_lo;
  params.max = params.clip_hi;

  RadarCube out(cube.frames(), cube.range_bins(), cube.azimuth_bins(), cube.meta);
  if (!(params.max > params.min)) {
    params.degenerate = true;
    return {std::move(out), params};
  }
  const double scale = 1.0 / (params.max - params.min);
  out.amplitudes() = ((x.cast<double>().array().max(params.clip_lo).min(params.clip_hi) - params.min) * scale)
                         .matrix()
                         .cast<float>();
  return {std::move(out), params};
}

}  // namespace radarcount
