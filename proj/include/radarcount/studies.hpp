#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "radarcount/augment.hpp"
#include "radarcount/countnet.hpp"
#include "radarcount/dataset.hpp"
#include "radarcount/metrics.hpp"
#include "radarcount/pipeline.hpp"
#include "radarcount/separability.hpp"

namespace radarcount {

/// Where a study gets its cubes: the built-in synthetic environment suite
/// (re-simulated per seed) or dataset manifests written by `generate`.
struct DataConfig {
  int n_per_class = 100;   // A' and B' scenes per person count
  int n_background = 60;   // extra empty-room scenes of A' for the background model
  std::optional<std::filesystem::path> a_manifest;
  std::optional<std::filesystem::path> b_manifest;
  std::optional<std::filesystem::path> c_manifest;
  std::optional<std::filesystem::path> background_manifest;
};

struct TransferConfig {
  std::vector<int> sizes = {100, 200, 400, 540};
  double size_scale = 1.0;  // multiplies sizes, val and test
  int val = 60;
  int test = 400;
  PreprocessMethod preprocess = PreprocessMethod::SigmoidWeight;

  std::vector<int> scaled_sizes() const;
  int scaled_val() const;
  int scaled_test() const;
};

struct StudyConfig {
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  DataConfig data;
  SplitFractions a_split{0.7, 0.1, 0.2};
  PreprocessConfig preprocess;  // parameters shared by every method
  std::vector<PreprocessMethod> methods{kAllPreprocessMethods.begin(), kAllPreprocessMethods.end()};
  std::vector<PreprocessMethod> separability_methods = {
      PreprocessMethod::ThresholdZero, PreprocessMethod::SigmoidWeight, PreprocessMethod::ButterworthBandpass,
      PreprocessMethod::TwoStageHighpass};
  PreprocessMethod augment_preprocess = PreprocessMethod::None;
  std::vector<std::string> augment_variants = {"none", "flips", "scale", "framedrop"};
  AugmentSpec augment;  // scale range, copies and scale mode for the variants
  TrainConfig train;
  TrainConfig fine_tune = [] {
    TrainConfig c;
    c.lr = kFineTuneLr;
    return c;
  }();
  TransferConfig transfer;
  int kmeans_restarts = 10;
  int jobs = 1;
  std::filesystem::path out = "results";
  bool plots = false;

  void validate() const;
};

/// (1 - method / baseline) * 100.
double improvement_rate(double baseline, double method);
/// Fixed-point text with `decimals` digits; negative zero prints as zero.
std::string format_fixed(double v, int decimals);
double median(std::vector<double> v);

struct EnvScores {
  RegressionReport a;
  RegressionReport b;  // second environment: B' or C'
};

struct MethodRow {
  std::string method;
  double a_rmse = 0.0, a_mae = 0.0;
  double x_rmse = 0.0, x_mae = 0.0;  // cross-environment columns
  double x_rmse_min = 0.0, x_rmse_max = 0.0;
  bool has_a = true;
};

/// Rows of a method comparison: medians, plus improvement of the
/// cross-environment errors relative to the first row.
std::string comparison_csv(const std::vector<MethodRow>& rows, const std::string& env_a, const std::string& env_x,
                           const std::string& test_hash);

struct SeparabilityRow {
  std::string method;
  SeparabilityReport person;
  SeparabilityReport layout;
};
std::string separability_csv(const std::vector<SeparabilityRow>& rows);

struct PreprocessStudy {
  std::vector<MethodRow> rows;
  std::vector<SeparabilityRow> separability;
  std::vector<std::vector<EnvScores>> per_seed;  // [seed][method]
  std::vector<std::vector<SeparabilityRow>> separability_per_seed;
  std::string test_hash;
};

struct AugmentStudy {
  std::vector<MethodRow> rows;
  std::vector<std::vector<EnvScores>> per_seed;  // [seed][variant]
  std::vector<std::size_t> train_sizes;          // per variant, first seed
  std::string test_hash;
};

struct TransferStudy {
  std::vector<MethodRow> rows;  // no-transfer, then each size
  std::vector<std::vector<double>> c_rmse_per_seed;  // [seed][row]
  bool monotone = true;
  std::string test_hash;
};

PreprocessStudy run_preprocess_study(const StudyConfig& cfg);
AugmentStudy run_augment_study(const StudyConfig& cfg);
TransferStudy run_transfer_study(const StudyConfig& cfg);

/// Writes the study CSVs (and SVG plots when enabled) into cfg.out.
void write_preprocess_study(const PreprocessStudy& s, const StudyConfig& cfg);
void write_augment_study(const AugmentStudy& s, const StudyConfig& cfg);
void write_transfer_study(const TransferStudy& s, const StudyConfig& cfg);

/// 64-bit FNV-1a over the encoded bytes of the given cubes, as hex.
std::string hash_cubes(const CubeSource& src, std::span<const std::size_t> indices, std::uint64_t basis = 0);

}  // namespace radarcount
