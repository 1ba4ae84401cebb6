#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "radarcount/cube.hpp"

namespace radarcount {

// Cube file layout, all integers little-endian:
//   0  magic "RDC1"
//   4  version u32 (= 1)
//   8  frames u32
//  12  range u32
//  16  azimuth u32
//  20  label i32
//  24  environment u32
//  28  activity u32
//  32  seed u64 (all ones when absent)
//  40  layout u32
//  44  payload f32[frames * range * azimuth], frame-major, then range, then azimuth
inline constexpr std::size_t kCubeHeaderBytes = 44;
inline constexpr std::uint32_t kCubeVersion = 1;
inline constexpr std::uint64_t kNoSeed = ~std::uint64_t{0};

std::vector<std::uint8_t> encode_cube(const RadarCube& cube);
RadarCube decode_cube(const std::vector<std::uint8_t>& bytes);

void write_cube(const RadarCube& cube, const std::filesystem::path& path);
RadarCube read_cube(const std::filesystem::path& path);

/// One line of a dataset manifest (JSON lines). `path` is stored relative to
/// the manifest's directory when possible.
struct ManifestEntry {
  std::filesystem::path path;
  int label = 0;
  Environment environment = Environment::Synthetic;
  Activity activity = Activity::Standing;
  Split split = Split::Unassigned;
  std::uint32_t layout = 0;
};

void write_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& manifest);
/// Returned paths are resolved against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest);

/// Writes every cube as `<dir>/<prefix><index>.rdc` plus `<dir>/manifest.jsonl`.
std::filesystem::path write_dataset(const Dataset& ds, const std::filesystem::path& dir,
                                    const std::string& prefix = "cube_");
Dataset read_dataset(const std::filesystem::path& manifest);

}  // namespace radarcount
