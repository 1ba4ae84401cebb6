#pragma once

#include <cstdint>
#include <span>

#include "radarcount/cube.hpp"

namespace radarcount {

inline constexpr int kDefaultBackgroundRank = 8;

/// Low-rank model of empty-room frames: a mean frame plus an orthonormal
/// basis (columns of `basis`, one flattened range x azimuth frame each).
struct BackgroundModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd basis;
  int range_bins = 0;
  int azimuth_bins = 0;

  int rank() const { return static_cast<int>(basis.cols()); }
  /// mean + projection of `frame - mean` onto the basis.
  Eigen::VectorXd reconstruct(const Eigen::Ref<const Eigen::VectorXd>& frame) const;
};

/// Streams background cubes into a running mean and scatter matrix
/// (pairwise merge per cube, so no frame matrix is kept in memory).
class BackgroundAccumulator {
 public:
  void add(const RadarCube& cube);
  std::int64_t frames() const { return count_; }
  /// Top-`rank` principal directions by orthogonal (subspace) power
  /// iteration from a seeded random start.
  BackgroundModel fit(int rank, std::uint64_t seed = 0) const;

 private:
  std::int64_t count_ = 0;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd scatter_;
  int range_bins_ = 0;
  int azimuth_bins_ = 0;
};

/// Throws if any cube has a non-zero label.
BackgroundModel fit_background(std::span<const RadarCube> backgrounds, int rank, std::uint64_t seed = 0);

/// |frame - reconstruction| per frame, without renormalisation.
Eigen::MatrixXd background_residual(const RadarCube& cube, const BackgroundModel& m);
/// Residual magnitude min-max scaled onto [0, 1] per cube.
RadarCube suppress_background(const RadarCube& cube, const BackgroundModel& m);

}  // namespace radarcount
