#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "radarcount/scene.hpp"
#include "radarcount/studies.hpp"

namespace radarcount {

/// Invalid or missing configuration value; `field` is the dotted JSON path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Synthetic dataset generation: the environment suite, or explicit scenes.
struct GenerateConfig {
  std::uint64_t seed = 0;
  int n_per_class = 0;
  int n_background = 0;
  std::vector<std::string> environments = {"a", "b", "c"};
  std::vector<SceneConfig> scenes;  // when non-empty, written as one "custom" dataset
  std::optional<SplitFractions> split;  // splits left unassigned when absent
};

nlohmann::json read_json_file(const std::filesystem::path& path);

GenerateConfig generate_config_from_json(const nlohmann::json& j);
StudyConfig study_config_from_json(const nlohmann::json& j);
TrainConfig train_config_from_json(const nlohmann::json& j, const std::string& path, TrainConfig defaults = {});
PreprocessConfig preprocess_config_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace radarcount
