#include "radarcount/separability.hpp"

#include <set>
#include <stdexcept>

#include "radarcount/ami.hpp"
#include "radarcount/clustering.hpp"
#include "radarcount/metrics.hpp"
#include "radarcount/preprocess.hpp"

namespace radarcount {

std::string to_string(Labeling l) {
  return l == Labeling::PersonCount ? "person_count" : "layout_type";
}

Eigen::RowVectorXd std_map_row(const RadarCube& cube) {
  const SpatialMap m = std_map(cube).values;
  return Eigen::Map<const Eigen::RowVectorXd>(m.data(), m.size());
}

SeparabilityScores separability_scores(const Eigen::MatrixXd& std_maps, std::span<const int> labels,
                                       const SeparabilityOptions& opt) {
  const std::set<int> distinct(labels.begin(), labels.end());
  const auto km = kmeans(std_maps, static_cast<int>(distinct.size()), opt.restarts, opt.seed);
  return {ami(km.labels, labels), fisher_score(std_maps, labels).score};
}

std::array<SeparabilityReport, 2> separability_suite(const CubeSource& src, const Preprocessor& pp,
                                                     const SeparabilityOptions& opt) {
  const auto layouts32 = src.layouts();
  const std::vector<int> layouts(layouts32.begin(), layouts32.end());
  if (std::set<int>(layouts.begin(), layouts.end()).size() < 2) {
    throw std::invalid_argument("separability suite needs layout labels (fewer than two distinct layouts found)");
  }
  const auto counts = src.labels();
  const auto n = static_cast<Eigen::Index>(src.size());
  Eigen::MatrixXd before, after;
  for (Eigen::Index i = 0; i < n; ++i) {
    const RadarCube cube = src.load(static_cast<std::size_t>(i));
    const auto raw = std_map_row(cube);
    if (i == 0) {
      before.resize(n, raw.size());
      after.resize(n, raw.size());
    }
    before.row(i) = raw;
    after.row(i) = std_map_row(pp(cube));
  }
  std::array<SeparabilityReport, 2> out;
  out[0] = {Labeling::PersonCount, separability_scores(before, counts, opt), separability_scores(after, counts, opt)};
  out[1] = {Labeling::LayoutType, separability_scores(before, layouts, opt), separability_scores(after, layouts, opt)};
  return out;
}

}  // namespace radarcount
