#include "radarcount/features.hpp"

#include <stdexcept>

namespace radarcount {

std::pair<int, int> FeatureExtractor::band(int n, int parts, int i) {
  const int width = n / parts;
  const int begin = i * width;
  return {begin, i == parts - 1 ? n : begin + width};
}

Eigen::MatrixXd FeatureExtractor::pooling_matrix(int range_bins, int azimuth_bins) const {
  if (pool_rows < 1 || pool_cols < 1 || range_bins < pool_rows || azimuth_bins < pool_cols) {
    throw std::invalid_argument("pool grid does not fit the cube");
  }
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(range_bins * azimuth_bins, regions());
  for (int pr = 0; pr < pool_rows; ++pr) {
    const auto [r0, r1] = band(range_bins, pool_rows, pr);
    for (int pc = 0; pc < pool_cols; ++pc) {
      const auto [a0, a1] = band(azimuth_bins, pool_cols, pc);
      const double w = 1.0 / static_cast<double>((r1 - r0) * (a1 - a0));
      for (int r = r0; r < r1; ++r)
        for (int a = a0; a < a1; ++a) p(r * azimuth_bins + a, pr * pool_cols + pc) = w;
    }
  }
  return p;
}

Eigen::VectorXd FeatureExtractor::operator()(const RadarCube& cube) const {
  const Eigen::MatrixXd pooled =
      cube.amplitudes().cast<double>() * pooling_matrix(cube.range_bins(), cube.azimuth_bins());
  const int k = regions();
  Eigen::VectorXd f(dim());
  const Eigen::RowVectorXd mean = pooled.colwise().mean();
  f.segment(0, k) = mean.transpose();
  f.segment(k, k) = ((pooled.rowwise() - mean).colwise().squaredNorm() / static_cast<double>(pooled.rows()))
                        .cwiseSqrt()
                        .transpose();
  f.segment(2 * k, k) = pooled.colwise().maxCoeff().transpose();
  return f;
}

Eigen::MatrixXd FeatureExtractor::batch(std::span<const RadarCube> cubes) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(cubes.size()), dim());
  for (std::size_t i = 0; i < cubes.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = (*this)(cubes[i]).transpose();
  return out;
}

}  // namespace radarcount
