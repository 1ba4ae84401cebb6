#include "radarcount/clustering.hpp"

#include <limits>
#include <random>
#include <set>
#include <stdexcept>

namespace radarcount {
namespace {

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x, const Eigen::MatrixXd& c) {
  Eigen::MatrixXd d(x.rows(), c.rows());
  for (Eigen::Index j = 0; j < c.rows(); ++j) d.col(j) = (x.rowwise() - c.row(j)).rowwise().squaredNorm();
  return d;
}

Eigen::MatrixXd plus_plus_seed(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd c(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  c.row(0) = x.row(first(rng));
  Eigen::VectorXd d2 = (x.rowwise() - c.row(0)).rowwise().squaredNorm();
  for (int j = 1; j < k; ++j) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      double acc = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (u < acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);
    }
    c.row(j) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - c.row(j)).rowwise().squaredNorm());
  }
  return c;
}

KMeansResult lloyd(const Eigen::MatrixXd& x, Eigen::MatrixXd c, int max_iter) {
  KMeansResult r;
  const Eigen::Index n = x.rows();
  const int k = static_cast<int>(c.rows());
  r.labels.assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    const Eigen::MatrixXd d = squared_distances(x, c);
    bool changed = false;
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      d.row(i).minCoeff(&best);  // first minimum, i.e. lowest index on ties
      inertia += d(i, best);
      if (r.labels[static_cast<std::size_t>(i)] != best) {
        r.labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
        changed = true;
      }
    }
    r.inertia_history.push_back(inertia);
    r.inertia = inertia;
    if (!changed) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(r.labels[static_cast<std::size_t>(i)]) += x.row(i);
      counts(r.labels[static_cast<std::size_t>(i)]) += 1.0;
    }
    // Empty clusters keep their centroid.
    for (int j = 0; j < k; ++j)
      if (counts(j) > 0.0) c.row(j) = sums.row(j) / counts(j);
  }
  r.centroids = std::move(c);
  return r;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, int restarts, std::uint64_t seed, int max_iter) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (points.rows() < k) throw std::invalid_argument("kmeans needs at least k points");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");

  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int run = 0; run < restarts; ++run) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(run + 1));
    KMeansResult r = lloyd(points, plus_plus_seed(points, k, rng), max_iter);
    if (r.inertia < best.inertia) best = std::move(r);
  }
  std::set<int> used(best.labels.begin(), best.labels.end());
  best.effective_clusters = static_cast<int>(used.size());
  best.degenerate = best.effective_clusters < k;
  return best;
}

}  // namespace radarcount
