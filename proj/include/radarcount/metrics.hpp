#pragma once

#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace radarcount {

struct RegressionReport {
  double rmse = 0.0;
  double mae = 0.0;
  std::size_t n = 0;
  std::map<int, double> per_class_mae;
};

/// Errors of raw (unrounded) predictions against integer labels.
RegressionReport rmse_mae(std::span<const double> preds, std::span<const int> labels);

struct FisherResult {
  double score = 0.0;               // mean of per-feature scores over kept features
  Eigen::VectorXd per_feature;      // NaN where skipped
  std::vector<Eigen::Index> skipped;  // features with within-class scatter < 1e-12
};

/// Per feature: sum_j n_j (mu_j - mu)^2 / sum_j n_j var_j, with population
/// variances inside each class. Rows of `features` are samples.
FisherResult fisher_score(const Eigen::MatrixXd& features, std::span<const int> labels);

}  // namespace radarcount
