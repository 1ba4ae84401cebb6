#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "radarcount/dataset.hpp"
#include "radarcount/pipeline.hpp"

namespace radarcount {

enum class Labeling { PersonCount, LayoutType };
std::string to_string(Labeling l);

struct SeparabilityScores {
  double ami = 0.0;
  double fisher = 0.0;
};

struct SeparabilityReport {
  Labeling labeling = Labeling::PersonCount;
  SeparabilityScores before;  // raw normalised cubes
  SeparabilityScores after;   // preprocessed cubes
};

struct SeparabilityOptions {
  int restarts = 10;
  std::uint64_t seed = 0;
};

/// Flattened per-cube std-map, one row per cube.
Eigen::RowVectorXd std_map_row(const RadarCube& cube);

/// k-means AMI (k = number of distinct labels) and mean Fisher score of the
/// std-map rows against one labelling.
SeparabilityScores separability_scores(const Eigen::MatrixXd& std_maps, std::span<const int> labels,
                                       const SeparabilityOptions& opt);

/// Before/after scores for the person-count and layout labellings. Throws
/// when the source carries fewer than two distinct layouts.
std::array<SeparabilityReport, 2> separability_suite(const CubeSource& src, const Preprocessor& pp,
                                                     const SeparabilityOptions& opt = {});

}  // namespace radarcount
