#include "radarcount/cube_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>

#include <json.hpp>

namespace radarcount {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
using Bits = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  using U = Bits<T>;
  U u;
  std::memcpy(&u, &value, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

template <typename T>
T get_le(const std::vector<std::uint8_t>& in, std::size_t offset) {
  using U = Bits<T>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(in[offset + i]) << (8 * i);
  T value;
  std::memcpy(&value, &u, sizeof(T));
  return value;
}

std::string at_offset(const std::string& what, std::size_t offset) {
  return what + " at offset " + std::to_string(offset);
}

}  // namespace

std::vector<std::uint8_t> encode_cube(const RadarCube& cube) {
  const auto n = static_cast<std::size_t>(cube.frames()) * cube.cells();
  std::vector<std::uint8_t> out;
  out.reserve(kCubeHeaderBytes + 4 * n);
  for (char c : {'R', 'D', 'C', '1'}) out.push_back(static_cast<std::uint8_t>(c));
  put_le<std::uint32_t>(out, kCubeVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cube.frames()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cube.range_bins()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cube.azimuth_bins()));
  put_le<std::int32_t>(out, cube.meta.label);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cube.meta.environment));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cube.meta.activity));
  put_le<std::uint64_t>(out, cube.meta.seed.value_or(kNoSeed));
  put_le<std::uint32_t>(out, cube.meta.layout);
  const float* data = cube.amplitudes().data();
  for (std::size_t i = 0; i < n; ++i) put_le<float>(out, data[i]);
  return out;
}

RadarCube decode_cube(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kCubeHeaderBytes) {
    throw FormatError(at_offset("truncated header (" + std::to_string(bytes.size()) + " bytes)", bytes.size()));
  }
  if (std::memcmp(bytes.data(), "RDC1", 4) != 0) throw FormatError(at_offset("bad magic", 0));
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kCubeVersion) {
    throw FormatError(at_offset("unsupported version " + std::to_string(version), 4));
  }
  const auto frames = get_le<std::uint32_t>(bytes, 8);
  const auto range = get_le<std::uint32_t>(bytes, 12);
  const auto azimuth = get_le<std::uint32_t>(bytes, 16);
  if (frames == 0 || range == 0 || azimuth == 0 || frames > (1u << 20) || range > (1u << 16) ||
      azimuth > (1u << 16)) {
    throw FormatError(at_offset("dimension mismatch " + std::to_string(frames) + "x" + std::to_string(range) +
                                    "x" + std::to_string(azimuth),
                                8));
  }
  const std::size_t n = static_cast<std::size_t>(frames) * range * azimuth;
  const std::size_t expected = kCubeHeaderBytes + 4 * n;
  if (bytes.size() < expected) {
    throw FormatError(at_offset("truncated payload, expected " + std::to_string(expected) + " bytes", bytes.size()));
  }
  if (bytes.size() > expected) {
    throw FormatError(at_offset("dimension mismatch, trailing bytes", expected));
  }

  SampleMeta meta;
  meta.label = get_le<std::int32_t>(bytes, 20);
  const auto env = get_le<std::uint32_t>(bytes, 24);
  const auto act = get_le<std::uint32_t>(bytes, 28);
  if (env > static_cast<std::uint32_t>(Environment::Synthetic)) {
    throw FormatError(at_offset("bad environment code " + std::to_string(env), 24));
  }
  if (act > static_cast<std::uint32_t>(Activity::Mixed)) {
    throw FormatError(at_offset("bad activity code " + std::to_string(act), 28));
  }
  meta.environment = static_cast<Environment>(env);
  meta.activity = static_cast<Activity>(act);
  const auto seed = get_le<std::uint64_t>(bytes, 32);
  if (seed != kNoSeed) meta.seed = seed;
  meta.layout = get_le<std::uint32_t>(bytes, 40);

  RadarCube cube(static_cast<int>(frames), static_cast<int>(range), static_cast<int>(azimuth), std::move(meta));
  float* data = cube.amplitudes().data();
  for (std::size_t i = 0; i < n; ++i) data[i] = get_le<float>(bytes, kCubeHeaderBytes + 4 * i);
  return cube;
}

void write_cube(const RadarCube& cube, const std::filesystem::path& path) {
  const auto bytes = encode_cube(cube);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

RadarCube read_cube(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_cube(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& manifest) {
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + manifest.string() + "' for writing");
  const auto base = manifest.parent_path();
  for (const auto& e : entries) {
    std::filesystem::path p = e.path;
    if (!base.empty() && p.is_absolute() == base.is_absolute()) {
      auto rel = p.lexically_relative(base);
      if (!rel.empty() && *rel.begin() != "..") p = rel;
    }
    nlohmann::ordered_json j;
    j["path"] = p.generic_string();
    j["label"] = e.label;
    j["environment"] = to_string(e.environment);
    j["activity"] = to_string(e.activity);
    j["split"] = to_string(e.split);
    j["layout"] = e.layout;
    out << j.dump() << '\n';
  }
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw std::runtime_error("cannot open manifest '" + manifest.string() + "'");
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ManifestEntry e;
      e.path = j.at("path").get<std::string>();
      if (e.path.is_relative()) e.path = manifest.parent_path() / e.path;
      e.label = j.at("label").get<int>();
      e.environment = environment_from_string(j.at("environment").get<std::string>());
      e.activity = activity_from_string(j.at("activity").get<std::string>());
      e.split = split_from_string(j.value("split", std::string{}));
      e.layout = j.value("layout", 0u);
      entries.push_back(std::move(e));
    } catch (const std::exception& ex) {
      throw FormatError(manifest.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return entries;
}

std::filesystem::path write_dataset(const Dataset& ds, const std::filesystem::path& dir, const std::string& prefix) {
  std::filesystem::create_directories(dir);
  std::vector<ManifestEntry> entries;
  entries.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::ostringstream name;
    name << prefix << std::setw(5) << std::setfill('0') << i << ".rdc";
    const auto path = dir / name.str();
    const auto& c = ds.cubes[i];
    write_cube(c, path);
    entries.push_back({path, c.meta.label, c.meta.environment, c.meta.activity, ds.split_of(i), c.meta.layout});
  }
  const auto manifest = dir / "manifest.jsonl";
  write_manifest(entries, manifest);
  return manifest;
}

Dataset read_dataset(const std::filesystem::path& manifest) {
  Dataset ds;
  for (const auto& e : read_manifest(manifest)) {
    ds.cubes.push_back(read_cube(e.path));
    ds.splits.push_back(e.split);
  }
  return ds;
}

}  // namespace radarcount
