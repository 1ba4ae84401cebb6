#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "radarcount/cube.hpp"

namespace radarcount {

struct SplitFractions {
  double train = 1.0;
  double val = 0.0;
  double test = 0.0;
};

/// Per-class shuffled assignment of train/val/test tags. Each class is split
/// with floor + largest-remainder rounding, so per-class counts track the
/// fractions within one sample. Throws if any class in [0, max label] is empty.
std::vector<Split> stratified_assign(std::span<const int> labels, SplitFractions fractions, std::uint64_t seed);

Dataset stratified_split(Dataset ds, SplitFractions fractions, std::uint64_t seed);

/// Picks `n` of `candidates` (indices into `labels`) with per-class counts
/// differing by at most one. Result is sorted.
std::vector<std::size_t> stratified_subsample(std::span<const int> labels, std::span<const std::size_t> candidates,
                                              std::size_t n, std::uint64_t seed);

std::vector<std::size_t> indices_of(std::span<const Split> splits, Split which);

/// Lazily materialised collection of cubes: metadata is known up front, the
/// amplitudes are produced on demand (read from disk or re-simulated).
struct CubeSource {
  std::vector<SampleMeta> meta;
  std::vector<Split> splits;  // empty, or one per cube
  std::function<RadarCube(std::size_t)> load;

  std::size_t size() const { return meta.size(); }
  std::vector<int> labels() const;
  std::vector<std::uint32_t> layouts() const;
};

CubeSource source_from_dataset(Dataset ds);
CubeSource source_from_manifest(const std::filesystem::path& manifest);

}  // namespace radarcount
