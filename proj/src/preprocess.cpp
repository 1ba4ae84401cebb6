#include "radarcount/preprocess.hpp"

#include <limits>
#include <stdexcept>

namespace radarcount {

StdMap std_map(const RadarCube& cube) {
  if (cube.frames() < 2) throw std::invalid_argument("std_map: need at least 2 frames");
  const Eigen::MatrixXd x = cube.amplitudes().cast<double>();
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::RowVectorXd var = (x.rowwise() - mean).colwise().squaredNorm() / static_cast<double>(x.rows());
  StdMap out;
  out.values = Eigen::Map<const SpatialMap>(var.data(), cube.range_bins(), cube.azimuth_bins()).sqrt();
  return out;
}

RadarCube threshold_zero(const RadarCube& cube, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("threshold_zero: tau must be >= 0");
  const auto sm = std_map(cube);
  RadarCube out = cube;
  const double* sigma = sm.values.data();
  for (int k = 0; k < cube.cells(); ++k) {
    if (sigma[k] <= tau) out.amplitudes().col(k).setZero();
  }
  return out;
}

WeightMap sigmoid_weight_map(const StdMap& sm, const SigmoidParams& p) {
  if (!(p.s > 0.0)) throw std::invalid_argument("sigmoid_weight_map: s must be > 0");
  WeightMap w;
  w.values = sm.values.unaryExpr([&](double sigma) { return stable_sigmoid((sigma - p.tau) / p.s); });
  return w;
}

RadarCube apply_weight(const RadarCube& cube, const WeightMap& w) {
  if (w.values.rows() != cube.range_bins() || w.values.cols() != cube.azimuth_bins()) {
    throw std::invalid_argument("apply_weight: weight map shape does not match cube");
  }
  RadarCube out = cube;
  const Eigen::Map<const Eigen::RowVectorXd> flat(w.values.data(), cube.cells());
  out.amplitudes() = (cube.amplitudes().cast<double>().array().rowwise() * flat.array()).matrix().cast<float>();
  return out;
}

}  // namespace radarcount
