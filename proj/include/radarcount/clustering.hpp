#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace radarcount {

struct KMeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;  // k x d
  double inertia = 0.0;
  std::vector<double> inertia_history;  // after each assignment step of the winning run
  int effective_clusters = 0;
  bool degenerate = false;  // fewer than k distinct points
};

/// Lloyd iterations from k-means++ seeding, best inertia over `restarts`
/// runs (lowest restart index wins ties). Points equidistant to several
/// centroids go to the lowest cluster index. Rows of `points` are samples.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, int restarts, std::uint64_t seed, int max_iter = 300);

}  // namespace radarcount
