#include "radarcount/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>

#include "radarcount/cube_io.hpp"

namespace radarcount {
namespace {

std::map<int, std::vector<std::size_t>> group_by_class(std::span<const int> labels,
                                                        std::span<const std::size_t> candidates) {
  std::map<int, std::vector<std::size_t>> groups;
  for (auto i : candidates) groups[labels[i]].push_back(i);
  return groups;
}

std::array<std::size_t, 3> apportion(std::size_t n, const std::array<double, 3>& f) {
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    const double exact = f[k] * static_cast<double>(n);
    // Guard against 0.54 * 250 landing on 134.99999...
    const double floored = std::floor(exact + 1e-9);
    counts[k] = static_cast<std::size_t>(floored);
    remainder[k] = exact - floored;
    assigned += counts[k];
  }
  while (assigned < n) {
    int best = 0;
    for (int k = 1; k < 3; ++k) {
      if (remainder[k] > remainder[best]) best = k;
    }
    ++counts[best];
    remainder[best] = -1.0;
    ++assigned;
  }
  return counts;
}

}  // namespace

std::vector<Split> stratified_assign(std::span<const int> labels, SplitFractions fractions, std::uint64_t seed) {
  const std::array<double, 3> f{fractions.train, fractions.val, fractions.test};
  for (double x : f) {
    if (!(x >= 0.0)) throw std::invalid_argument("split fractions must be non-negative");
  }
  if (std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9) throw std::invalid_argument("split fractions must sum to 1");
  if (labels.empty()) throw std::invalid_argument("cannot split an empty dataset");

  std::vector<std::size_t> all(labels.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto groups = group_by_class(labels, all);
  const int max_label = groups.rbegin()->first;
  for (int c = 0; c <= max_label; ++c) {
    if (!groups.contains(c)) throw std::invalid_argument("class " + std::to_string(c) + " has no samples");
  }

  std::mt19937_64 rng(seed);
  std::vector<Split> out(labels.size(), Split::Unassigned);
  for (auto [cls, members] : groups) {
    std::shuffle(members.begin(), members.end(), rng);
    const auto counts = apportion(members.size(), f);
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k) {
      const Split tag = k == 0 ? Split::Train : (k == 1 ? Split::Val : Split::Test);
      for (std::size_t j = 0; j < counts[k]; ++j) out[members[pos++]] = tag;
    }
  }
  return out;
}

Dataset stratified_split(Dataset ds, SplitFractions fractions, std::uint64_t seed) {
  const auto labels = ds.labels();
  ds.splits = stratified_assign(labels, fractions, seed);
  return ds;
}

std::vector<std::size_t> stratified_subsample(std::span<const int> labels, std::span<const std::size_t> candidates,
                                              std::size_t n, std::uint64_t seed) {
  if (n > candidates.size()) {
    throw std::invalid_argument("requested " + std::to_string(n) + " samples from a pool of " +
                                std::to_string(candidates.size()));
  }
  auto groups = group_by_class(labels, candidates);
  std::mt19937_64 rng(seed);
  for (auto& [cls, members] : groups) std::shuffle(members.begin(), members.end(), rng);

  // Round-robin over classes keeps per-class counts within one of each other
  // until a class runs dry.
  std::vector<std::size_t> picked;
  picked.reserve(n);
  std::map<int, std::size_t> cursor;
  while (picked.size() < n) {
    for (auto& [cls, members] : groups) {
      if (picked.size() == n) break;
      auto& c = cursor[cls];
      if (c < members.size()) picked.push_back(members[c++]);
    }
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

std::vector<std::size_t> indices_of(std::span<const Split> splits, Split which) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == which) out.push_back(i);
  }
  return out;
}

std::vector<int> CubeSource::labels() const {
  std::vector<int> out;
  out.reserve(meta.size());
  for (const auto& m : meta) out.push_back(m.label);
  return out;
}

std::vector<std::uint32_t> CubeSource::layouts() const {
  std::vector<std::uint32_t> out;
  out.reserve(meta.size());
  for (const auto& m : meta) out.push_back(m.layout);
  return out;
}

CubeSource source_from_dataset(Dataset ds) {
  auto shared = std::make_shared<const Dataset>(std::move(ds));
  CubeSource src;
  for (const auto& c : shared->cubes) src.meta.push_back(c.meta);
  src.splits = shared->splits;
  src.load = [shared](std::size_t i) { return shared->cubes.at(i); };
  return src;
}

CubeSource source_from_manifest(const std::filesystem::path& manifest) {
  if (!std::filesystem::exists(manifest)) {
    throw std::runtime_error("missing dataset: " + manifest.string());
  }
  auto entries = std::make_shared<const std::vector<ManifestEntry>>(read_manifest(manifest));
  CubeSource src;
  for (const auto& e : *entries) {
    SampleMeta m;
    m.label = e.label;
    m.environment = e.environment;
    m.activity = e.activity;
    m.layout = e.layout;
    src.meta.push_back(m);
    src.splits.push_back(e.split);
  }
  src.load = [entries](std::size_t i) { return read_cube(entries->at(i).path); };
  return src;
}

}  // namespace radarcount
