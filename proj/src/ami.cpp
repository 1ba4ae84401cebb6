#include "radarcount/ami.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace radarcount {
namespace {

std::vector<int> compact(std::span<const int> labels, int& k) {
  std::map<int, int> ids;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(ids.try_emplace(l, static_cast<int>(ids.size())).first->second);
  k = static_cast<int>(ids.size());
  return out;
}

bool same_partition(const ContingencyTable& t) {
  if (t.counts.rows() != t.counts.cols()) return false;
  for (Eigen::Index i = 0; i < t.counts.rows(); ++i) {
    if ((t.counts.row(i).array() > 0).count() != 1) return false;
  }
  for (Eigen::Index j = 0; j < t.counts.cols(); ++j) {
    if ((t.counts.col(j).array() > 0).count() != 1) return false;
  }
  return true;
}

}  // namespace

ContingencyTable contingency(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw std::invalid_argument("label vectors differ in length");
  int ka = 0, kb = 0;
  const auto ca = compact(a, ka);
  const auto cb = compact(b, kb);
  ContingencyTable t;
  t.counts = Eigen::MatrixXi::Zero(ka, kb);
  for (std::size_t i = 0; i < ca.size(); ++i) ++t.counts(ca[i], cb[i]);
  t.row_sums = t.counts.rowwise().sum();
  t.col_sums = t.counts.colwise().sum().transpose();
  t.n = static_cast<int>(a.size());
  return t;
}

double entropy(const Eigen::VectorXi& sizes) {
  const double n = sizes.sum();
  double h = 0.0;
  for (Eigen::Index i = 0; i < sizes.size(); ++i) {
    if (sizes(i) > 0) {
      const double p = sizes(i) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

double mutual_information(const ContingencyTable& t) {
  const double n = t.n;
  double mi = 0.0;
  for (Eigen::Index i = 0; i < t.counts.rows(); ++i) {
    for (Eigen::Index j = 0; j < t.counts.cols(); ++j) {
      const int nij = t.counts(i, j);
      if (nij == 0) continue;
      mi += nij / n * std::log(n * nij / (static_cast<double>(t.row_sums(i)) * t.col_sums(j)));
    }
  }
  return std::max(mi, 0.0);
}

double expected_mutual_information(const ContingencyTable& t) {
  const int n = t.n;
  const double nd = n;
  const double lg_n = std::lgamma(nd + 1.0);
  double emi = 0.0;
  for (Eigen::Index i = 0; i < t.row_sums.size(); ++i) {
    const int a = t.row_sums(i);
    for (Eigen::Index j = 0; j < t.col_sums.size(); ++j) {
      const int b = t.col_sums(j);
      const double fixed = std::lgamma(a + 1.0) + std::lgamma(b + 1.0) + std::lgamma(nd - a + 1.0) +
                           std::lgamma(nd - b + 1.0) - lg_n;
      for (int nij = std::max(1, a + b - n); nij <= std::min(a, b); ++nij) {
        const double log_p = fixed - std::lgamma(nij + 1.0) - std::lgamma(a - nij + 1.0) -
                             std::lgamma(b - nij + 1.0) - std::lgamma(nd - a - b + nij + 1.0);
        emi += nij / nd * std::log(nd * nij / (static_cast<double>(a) * b)) * std::exp(log_p);
      }
    }
  }
  return emi;
}

double ami(std::span<const int> a, std::span<const int> b) {
  const auto t = contingency(a, b);
  if (t.n < 2) throw std::invalid_argument("ami needs at least 2 samples");
  if (same_partition(t)) return 1.0;
  const double mi = mutual_information(t);
  const double emi = expected_mutual_information(t);
  const double h = std::max(entropy(t.row_sums), entropy(t.col_sums));
  double denom = h - emi;
  if (std::abs(denom) < std::numeric_limits<double>::epsilon()) denom = std::numeric_limits<double>::epsilon();
  return (mi - emi) / denom;
}

}  // namespace radarcount
