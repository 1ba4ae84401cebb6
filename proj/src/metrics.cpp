#include "radarcount/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace radarcount {

RegressionReport rmse_mae(std::span<const double> preds, std::span<const int> labels) {
  if (preds.size() != labels.size()) {
    throw std::invalid_argument("rmse_mae: " + std::to_string(preds.size()) + " predictions for " +
                                std::to_string(labels.size()) + " labels");
  }
  if (preds.empty()) throw std::invalid_argument("rmse_mae: no samples");
  RegressionReport r;
  r.n = preds.size();
  double sq = 0.0, ab = 0.0;
  std::map<int, std::pair<double, std::size_t>> per;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double e = preds[i] - labels[i];
    sq += e * e;
    ab += std::abs(e);
    auto& [sum, cnt] = per[labels[i]];
    sum += std::abs(e);
    ++cnt;
  }
  const auto n = static_cast<double>(r.n);
  r.rmse = std::sqrt(sq / n);
  r.mae = ab / n;
  for (const auto& [label, acc] : per) r.per_class_mae[label] = acc.first / static_cast<double>(acc.second);
  return r;
}

FisherResult fisher_score(const Eigen::MatrixXd& features, std::span<const int> labels) {
  const Eigen::Index n = features.rows();
  if (static_cast<std::size_t>(n) != labels.size()) throw std::invalid_argument("fisher_score: length mismatch");
  std::map<int, std::vector<Eigen::Index>> classes;
  for (Eigen::Index i = 0; i < n; ++i) classes[labels[static_cast<std::size_t>(i)]].push_back(i);
  if (classes.size() < 2) throw std::invalid_argument("fisher_score needs at least 2 classes");
  for (const auto& [label, rows] : classes) {
    if (rows.size() < 2) throw std::invalid_argument("class " + std::to_string(label) + " has fewer than 2 samples");
  }

  const Eigen::RowVectorXd mu = features.colwise().mean();
  Eigen::RowVectorXd between = Eigen::RowVectorXd::Zero(features.cols());
  Eigen::RowVectorXd within = Eigen::RowVectorXd::Zero(features.cols());
  for (const auto& [label, rows] : classes) {
    const Eigen::MatrixXd x = features(rows, Eigen::all);
    const auto nj = static_cast<double>(rows.size());
    const Eigen::RowVectorXd mj = x.colwise().mean();
    between += nj * (mj - mu).cwiseAbs2();
    // n_j * population variance = within-class sum of squares.
    within += (x.rowwise() - mj).colwise().squaredNorm();
  }

  FisherResult out;
  out.per_feature = Eigen::VectorXd::Constant(features.cols(), std::numeric_limits<double>::quiet_NaN());
  double sum = 0.0;
  Eigen::Index kept = 0;
  for (Eigen::Index f = 0; f < features.cols(); ++f) {
    if (within(f) < 1e-12) {
      out.skipped.push_back(f);
      continue;
    }
    out.per_feature(f) = between(f) / within(f);
    sum += out.per_feature(f);
    ++kept;
  }
  out.score = kept > 0 ? sum / static_cast<double>(kept) : 0.0;
  return out;
}

}  // namespace radarcount
