#include "radarcount/cube.hpp"

#include <utility>

namespace radarcount {

RadarCube::RadarCube(int frames, int range_bins, int azimuth_bins, SampleMeta meta_in)
    : meta(std::move(meta_in)),
      amplitudes_(FrameMatrix::Zero(frames, range_bins * azimuth_bins)),
      range_bins_(range_bins),
      azimuth_bins_(azimuth_bins) {
  if (frames < 0 || range_bins < 0 || azimuth_bins < 0) {
    throw std::invalid_argument("RadarCube: negative dimension");
  }
}

RadarCube::RadarCube(FrameMatrix amplitudes, int range_bins, int azimuth_bins, SampleMeta meta_in)
    : meta(std::move(meta_in)),
      amplitudes_(std::move(amplitudes)),
      range_bins_(range_bins),
      azimuth_bins_(azimuth_bins) {
  if (amplitudes_.cols() != static_cast<Eigen::Index>(range_bins) * azimuth_bins) {
    throw std::invalid_argument("RadarCube: column count does not match range x azimuth");
  }
}

std::string to_string(Environment env) {
  switch (env) {
    case Environment::A: return "A";
    case Environment::B: return "B";
    case Environment::C: return "C";
    case Environment::Synthetic: return "synthetic";
  }
  return "unknown";
}

std::string to_string(Activity activity) {
  switch (activity) {
    case Activity::Standing: return "standing";
    case Activity::Walking: return "walking";
    case Activity::Mixed: return "mixed";
  }
  return "unknown";
}

std::string to_string(Split split) {
  switch (split) {
    case Split::Unassigned: return "";
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "";
}

Environment environment_from_string(const std::string& s) {
  if (s == "A") return Environment::A;
  if (s == "B") return Environment::B;
  if (s == "C") return Environment::C;
  if (s == "synthetic") return Environment::Synthetic;
  throw std::invalid_argument("unknown environment '" + s + "'");
}

Activity activity_from_string(const std::string& s) {
  if (s == "standing") return Activity::Standing;
  if (s == "walking") return Activity::Walking;
  if (s == "mixed") return Activity::Mixed;
  throw std::invalid_argument("unknown activity '" + s + "'");
}

Split split_from_string(const std::string& s) {
  if (s.empty()) return Split::Unassigned;
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  throw std::invalid_argument("unknown split '" + s + "'");
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(cubes.size());
  for (const auto& c : cubes) out.push_back(c.meta.label);
  return out;
}

}  // namespace radarcount
