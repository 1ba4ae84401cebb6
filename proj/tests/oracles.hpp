#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "radarcount/countnet.hpp"

// Reference computations that share no code with the library.
namespace oracle {

// Mutual information (nats) of two labelings by direct counting.
inline double mutual_information(const std::vector<int>& a, const std::vector<int>& b) {
  const int ka = *std::max_element(a.begin(), a.end()) + 1;
  const int kb = *std::max_element(b.begin(), b.end()) + 1;
  const double n = static_cast<double>(a.size());
  std::vector<double> joint(ka * kb, 0.0), pa(ka, 0.0), pb(kb, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[a[i] * kb + b[i]] += 1.0;
    pa[a[i]] += 1.0;
    pb[b[i]] += 1.0;
  }
  double mi = 0.0;
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j) {
      const double nij = joint[i * kb + j];
      if (nij > 0.0) mi += nij / n * std::log(n * nij / (pa[i] * pb[j]));
    }
  return mi;
}

// E[MI] under random relabelling with fixed marginals. Every distinct
// arrangement of the second labeling is equally likely, so averaging over
// the multiset permutations equals averaging over all n! permutations.
inline double expected_mi_by_permutation(const std::vector<int>& a, std::vector<int> b) {
  std::sort(b.begin(), b.end());
  double sum = 0.0;
  long count = 0;
  do {
    sum += mutual_information(a, b);
    ++count;
  } while (std::next_permutation(b.begin(), b.end()));
  return sum / static_cast<double>(count);
}

// Labeling 0..0 1..1 2..2 with the given block sizes.
inline std::vector<int> blocks(const std::vector<int>& sizes) {
  std::vector<int> out;
  for (std::size_t k = 0; k < sizes.size(); ++k) out.insert(out.end(), sizes[k], static_cast<int>(k));
  return out;
}

// Partitions of n into at most `parts` positive blocks, largest first.
inline std::vector<std::vector<int>> partitions(int n, int parts, int max_block = -1) {
  if (max_block < 0) max_block = n;
  if (n == 0) return {{}};
  if (parts == 0) return {};
  std::vector<std::vector<int>> out;
  for (int first = std::min(n, max_block); first >= 1; --first) {
    for (auto rest : partitions(n - first, parts - 1, first)) {
      rest.insert(rest.begin(), first);
      out.push_back(rest);
    }
  }
  return out;
}

// Largest norm-wise relative error between the analytic gradient and central
// differences with step h.
inline double gradient_relative_error(const radarcount::CountModel& model, const Eigen::MatrixXd& x,
                                      const Eigen::VectorXd& y, double h = 1e-4) {
  const auto analytic = radarcount::mse_gradient(model, x, y).second;
  Eigen::VectorXd numeric(analytic.size());
  radarcount::CountModel probe = model;
  for (Eigen::Index i = 0; i < probe.theta.size(); ++i) {
    const double keep = probe.theta(i);
    probe.theta(i) = keep + h;
    const double up = radarcount::mse(probe, x, y);
    probe.theta(i) = keep - h;
    const double down = radarcount::mse(probe, x, y);
    probe.theta(i) = keep;
    numeric(i) = (up - down) / (2.0 * h);
  }
  const double scale = std::max({analytic.norm(), numeric.norm(), 1e-12});
  return (analytic - numeric).norm() / scale;
}

// One random small instance: model with random weights and standardiser, and a batch.
struct GradInstance {
  radarcount::CountModel model;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

inline GradInstance random_grad_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(2, 9), hid(2, 8), rows(1, 12);
  std::normal_distribution<double> g(0.0, 1.0);
  GradInstance inst{radarcount::CountModel(dim(rng), hid(rng)), {}, {}};
  for (auto& v : inst.model.theta) v = g(rng);
  for (auto& v : inst.model.input_mean) v = 0.3 * g(rng);
  for (auto& v : inst.model.input_scale) v = 0.5 + std::abs(g(rng));
  const int n = rows(rng);
  inst.x.resize(n, inst.model.input_dim());
  inst.y.resize(n);
  for (Eigen::Index i = 0; i < inst.x.size(); ++i) inst.x.data()[i] = g(rng);
  for (Eigen::Index i = 0; i < n; ++i) inst.y(i) = std::uniform_int_distribution<int>(0, 3)(rng);
  return inst;
}

// Minimum distance of any hidden pre-activation to the ReLU kink.
inline double kink_margin(const GradInstance& s) {
  const Eigen::MatrixXd z =
      (s.x.rowwise() - s.model.input_mean.transpose()).array().rowwise() / s.model.input_scale.transpose().array();
  const Eigen::MatrixXd pre = (z * s.model.w1().transpose()).rowwise() + s.model.b1().transpose();
  return pre.cwiseAbs().minCoeff();
}

}  // namespace oracle
