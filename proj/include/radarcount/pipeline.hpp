#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>

#include "radarcount/background.hpp"
#include "radarcount/cube.hpp"
#include "radarcount/dataset.hpp"
#include "radarcount/iir.hpp"
#include "radarcount/preprocess.hpp"

namespace radarcount {

enum class PreprocessMethod {
  None,
  ThresholdZero,
  SigmoidWeight,
  ButterworthBandpass,
  TwoStageHighpass,
  BackgroundSuppress,
};

inline constexpr std::array<PreprocessMethod, 6> kAllPreprocessMethods = {
    PreprocessMethod::None,          PreprocessMethod::ThresholdZero,       PreprocessMethod::SigmoidWeight,
    PreprocessMethod::ButterworthBandpass, PreprocessMethod::TwoStageHighpass, PreprocessMethod::BackgroundSuppress,
};

/// Selector name: none, threshold_zero, sigmoid_weight, ...
std::string to_string(PreprocessMethod m);
PreprocessMethod preprocess_method_from_string(const std::string& s);
/// Human-readable table row label.
std::string display_name(PreprocessMethod m);

struct PreprocessConfig {
  PreprocessMethod method = PreprocessMethod::None;
  double tau = kDefaultTau;
  double s = 0.01;
  int bandpass_order = 4;
  double bandpass_low_hz = 0.1;
  double bandpass_high_hz = 0.5;
  BlendWiring wiring = BlendWiring::Cascade;
  int background_rank = kDefaultBackgroundRank;
  double sample_rate = kSampleRateHz;

  void validate() const;
};

/// A configured preprocessing step. Background suppression needs a fitted
/// model; the other methods are stateless.
class Preprocessor {
 public:
  explicit Preprocessor(PreprocessConfig cfg, std::shared_ptr<const BackgroundModel> background = nullptr);

  const PreprocessConfig& config() const { return cfg_; }
  bool needs_background() const { return cfg_.method == PreprocessMethod::BackgroundSuppress; }

  RadarCube operator()(const RadarCube& cube) const;

 private:
  PreprocessConfig cfg_;
  std::optional<TemporalFilter> filter_;
  std::shared_ptr<const BackgroundModel> background_;
};

/// Builds the preprocessor, fitting the background model from `backgrounds`
/// when the method requires one.
Preprocessor make_preprocessor(const PreprocessConfig& cfg, const CubeSource* backgrounds = nullptr,
                               std::uint64_t seed = 0);

}  // namespace radarcount
