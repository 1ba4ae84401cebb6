#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace radarcount {

/// counts(i, j) = samples in cluster i of the first labelling and class j
/// of the second. Labels are compacted to 0..k-1 in order of first appearance.
struct ContingencyTable {
  Eigen::MatrixXi counts;
  Eigen::VectorXi row_sums;
  Eigen::VectorXi col_sums;
  int n = 0;
};

ContingencyTable contingency(std::span<const int> a, std::span<const int> b);

/// Shannon entropy (nats) of a partition given its block sizes.
double entropy(const Eigen::VectorXi& sizes);
double mutual_information(const ContingencyTable& t);
/// Expected mutual information under random relabelling with fixed marginals
/// (hypergeometric model), in nats.
double expected_mutual_information(const ContingencyTable& t);

/// (MI - E[MI]) / (max(H(a), H(b)) - E[MI]). Identical partitions, and two
/// single-cluster partitions, give exactly 1.
double ami(std::span<const int> a, std::span<const int> b);

}  // namespace radarcount
