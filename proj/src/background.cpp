#include "radarcount/background.hpp"

#include <random>
#include <stdexcept>

#include "radarcount/normalize.hpp"

namespace radarcount {

Eigen::VectorXd BackgroundModel::reconstruct(const Eigen::Ref<const Eigen::VectorXd>& frame) const {
  if (basis.cols() == 0) return mean;
  return mean + basis * (basis.transpose() * (frame - mean));
}

void BackgroundAccumulator::add(const RadarCube& cube) {
  if (cube.meta.label != 0) {
    throw std::invalid_argument("background model accepts 0-person cubes only, got label " +
                                std::to_string(cube.meta.label));
  }
  if (count_ == 0) {
    range_bins_ = cube.range_bins();
    azimuth_bins_ = cube.azimuth_bins();
    mean_ = Eigen::VectorXd::Zero(cube.cells());
    scatter_ = Eigen::MatrixXd::Zero(cube.cells(), cube.cells());
  } else if (cube.range_bins() != range_bins_ || cube.azimuth_bins() != azimuth_bins_) {
    throw std::invalid_argument("background cubes must share one spatial shape");
  }
  const Eigen::MatrixXd x = cube.amplitudes().cast<double>();
  const Eigen::VectorXd batch_mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - batch_mean.transpose();
  Eigen::MatrixXd batch_scatter = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  batch_scatter.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
  batch_scatter.triangularView<Eigen::StrictlyUpper>() = batch_scatter.transpose();

  const auto na = static_cast<double>(count_);
  const auto nb = static_cast<double>(x.rows());
  const double n = na + nb;
  const Eigen::VectorXd delta = batch_mean - mean_;
  scatter_ += batch_scatter + (na * nb / n) * delta * delta.transpose();
  mean_ += (nb / n) * delta;
  count_ += x.rows();
}

BackgroundModel BackgroundAccumulator::fit(int rank, std::uint64_t seed) const {
  if (count_ == 0) throw std::invalid_argument("no background frames");
  if (rank < 0) throw std::invalid_argument("rank must be >= 0");
  if (count_ < rank + 1) {
    throw std::invalid_argument("need at least rank + 1 background frames, have " + std::to_string(count_));
  }
  BackgroundModel m;
  m.mean = mean_;
  m.range_bins = range_bins_;
  m.azimuth_bins = azimuth_bins_;
  const Eigen::Index d = mean_.size();
  if (rank == 0) {
    m.basis.resize(d, 0);
    return m;
  }
  if (rank > d) throw std::invalid_argument("rank exceeds frame dimension");

  const Eigen::MatrixXd cov = scatter_ / static_cast<double>(count_);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd q(d, rank);
  for (Eigen::Index i = 0; i < q.size(); ++i) q.data()[i] = gauss(rng);
  q = Eigen::HouseholderQR<Eigen::MatrixXd>(q).householderQ() * Eigen::MatrixXd::Identity(d, rank);

  Eigen::VectorXd prev = Eigen::VectorXd::Zero(rank);
  for (int iter = 0; iter < 300; ++iter) {
    const Eigen::MatrixXd z = cov * q;
    q = Eigen::HouseholderQR<Eigen::MatrixXd>(z).householderQ() * Eigen::MatrixXd::Identity(d, rank);
    const Eigen::VectorXd ritz = (q.transpose() * cov * q).diagonal();
    if (iter > 2 && (ritz - prev).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1e-300, ritz.cwiseAbs().maxCoeff())) break;
    prev = ritz;
  }
  // Rayleigh-Ritz rotation orders the basis by explained variance.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.transpose() * cov * q);
  m.basis = q * es.eigenvectors().rowwise().reverse();
  return m;
}

BackgroundModel fit_background(std::span<const RadarCube> backgrounds, int rank, std::uint64_t seed) {
  BackgroundAccumulator acc;
  for (const auto& c : backgrounds) acc.add(c);
  return acc.fit(rank, seed);
}

Eigen::MatrixXd background_residual(const RadarCube& cube, const BackgroundModel& m) {
  if (cube.range_bins() != m.range_bins || cube.azimuth_bins() != m.azimuth_bins) {
    throw std::invalid_argument("suppress_background: cube shape does not match model");
  }
  const Eigen::MatrixXd x = cube.amplitudes().cast<double>();
  Eigen::MatrixXd centered = x.rowwise() - m.mean.transpose();
  if (m.rank() > 0) centered -= (centered * m.basis) * m.basis.transpose();
  return centered.cwiseAbs();
}

RadarCube suppress_background(const RadarCube& cube, const BackgroundModel& m) {
  return RadarCube(minmax_to_unit(background_residual(cube, m)), cube.range_bins(), cube.azimuth_bins(), cube.meta);
}

}  // namespace radarcount
