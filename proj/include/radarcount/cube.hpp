#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace radarcount {

inline constexpr int kFrames = 60;
inline constexpr int kRangeBins = 12;
inline constexpr int kAzimuthBins = 91;
inline constexpr double kSampleRateHz = 8.57;
inline constexpr int kMaxPersons = 3;

/// Amplitudes of one clip: one row per frame, one column per (range, azimuth)
/// cell in row-major order, i.e. column = range * azimuth_bins + azimuth.
using FrameMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Spatial range x azimuth map, row-major so that its flat index matches the
/// column index of FrameMatrix.
template <typename Scalar>
using SpatialArray = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SpatialMap = SpatialArray<double>;

enum class Environment : std::uint32_t { A = 0, B = 1, C = 2, Synthetic = 3 };
enum class Activity : std::uint32_t { Standing = 0, Walking = 1, Mixed = 2 };

std::string to_string(Environment env);
std::string to_string(Activity activity);
Environment environment_from_string(const std::string& s);
Activity activity_from_string(const std::string& s);

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SampleMeta {
  int label = 0;
  Environment environment = Environment::Synthetic;
  Activity activity = Activity::Standing;
  std::optional<std::uint64_t> seed;
  std::uint32_t layout = 0;

  // Written by augmentation only; not part of the on-disk header.
  std::optional<double> scale_factor;
  std::vector<int> dropped_frames;

  bool operator==(const SampleMeta&) const = default;
};

class RadarCube {
 public:
  RadarCube() = default;
  RadarCube(int frames, int range_bins, int azimuth_bins, SampleMeta meta = {});
  RadarCube(FrameMatrix amplitudes, int range_bins, int azimuth_bins, SampleMeta meta = {});

  int frames() const { return static_cast<int>(amplitudes_.rows()); }
  int range_bins() const { return range_bins_; }
  int azimuth_bins() const { return azimuth_bins_; }
  int cells() const { return range_bins_ * azimuth_bins_; }
  int cell_index(int range, int azimuth) const { return range * azimuth_bins_ + azimuth; }

  float& at(int frame, int range, int azimuth) { return amplitudes_(frame, cell_index(range, azimuth)); }
  float at(int frame, int range, int azimuth) const { return amplitudes_(frame, cell_index(range, azimuth)); }

  FrameMatrix& amplitudes() { return amplitudes_; }
  const FrameMatrix& amplitudes() const { return amplitudes_; }

  /// Frame `t` viewed as a range x azimuth map.
  Eigen::Map<const SpatialArray<float>> frame(int t) const {
    return {amplitudes_.row(t).data(), range_bins_, azimuth_bins_};
  }

  bool same_shape(const RadarCube& other) const {
    return frames() == other.frames() && range_bins_ == other.range_bins_ &&
           azimuth_bins_ == other.azimuth_bins_;
  }

  bool operator==(const RadarCube& other) const {
    return same_shape(other) && meta == other.meta && amplitudes_ == other.amplitudes_;
  }

  SampleMeta meta;

 private:
  FrameMatrix amplitudes_;
  int range_bins_ = 0;
  int azimuth_bins_ = 0;
};

enum class Split : std::uint8_t { Unassigned, Train, Val, Test };
std::string to_string(Split split);
Split split_from_string(const std::string& s);

struct Dataset {
  std::vector<RadarCube> cubes;
  std::vector<Split> splits;  // empty, or one tag per cube

  std::size_t size() const { return cubes.size(); }
  Split split_of(std::size_t i) const { return splits.empty() ? Split::Unassigned : splits[i]; }
  std::vector<int> labels() const;
};

struct NormalizationParams {
  double clip_lo = 0.0;
  double clip_hi = 1.0;
  double min = 0.0;
  double max = 1.0;
  bool degenerate = false;
};

}  // namespace radarcount
