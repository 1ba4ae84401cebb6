#include "radarcount/pipeline.hpp"

#include <stdexcept>

namespace radarcount {

std::string to_string(PreprocessMethod m) {
  switch (m) {
    case PreprocessMethod::None: return "none";
    case PreprocessMethod::ThresholdZero: return "threshold_zero";
    case PreprocessMethod::SigmoidWeight: return "sigmoid_weight";
    case PreprocessMethod::ButterworthBandpass: return "butterworth_bandpass";
    case PreprocessMethod::TwoStageHighpass: return "two_stage_highpass";
    case PreprocessMethod::BackgroundSuppress: return "background_suppress";
  }
  throw std::logic_error("unknown preprocess method");
}

PreprocessMethod preprocess_method_from_string(const std::string& s) {
  for (auto m : kAllPreprocessMethods)
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown preprocessing method '" + s + "'");
}

std::string display_name(PreprocessMethod m) {
  switch (m) {
    case PreprocessMethod::None: return "Baseline";
    case PreprocessMethod::ThresholdZero: return "Threshold zeroing";
    case PreprocessMethod::SigmoidWeight: return "Sigmoid weighting";
    case PreprocessMethod::ButterworthBandpass: return "Butterworth band-pass";
    case PreprocessMethod::TwoStageHighpass: return "Two-stage high-pass";
    case PreprocessMethod::BackgroundSuppress: return "Background suppression (low-rank)";
  }
  throw std::logic_error("unknown preprocess method");
}

void PreprocessConfig::validate() const {
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be >= 0");
  if (!(s > 0.0)) throw std::invalid_argument("sigmoid steepness s must be > 0");
  if (background_rank < 0) throw std::invalid_argument("background rank must be >= 0");
}

Preprocessor::Preprocessor(PreprocessConfig cfg, std::shared_ptr<const BackgroundModel> background)
    : cfg_(cfg), background_(std::move(background)) {
  cfg_.validate();
  if (cfg_.method == PreprocessMethod::ButterworthBandpass) {
    filter_ = design_butterworth_bandpass(cfg_.bandpass_order, cfg_.bandpass_low_hz, cfg_.bandpass_high_hz,
                                          cfg_.sample_rate);
  } else if (cfg_.method == PreprocessMethod::TwoStageHighpass) {
    filter_ = design_two_stage_highpass(cfg_.sample_rate, cfg_.wiring);
  }
  if (needs_background() && !background_) throw std::invalid_argument("background suppression needs a fitted model");
}

RadarCube Preprocessor::operator()(const RadarCube& cube) const {
  switch (cfg_.method) {
    case PreprocessMethod::None: return cube;
    case PreprocessMethod::ThresholdZero: return threshold_zero(cube, cfg_.tau);
    case PreprocessMethod::SigmoidWeight:
      return apply_weight(cube, sigmoid_weight_map(std_map(cube), {cfg_.tau, cfg_.s}));
    case PreprocessMethod::ButterworthBandpass:
    case PreprocessMethod::TwoStageHighpass: return filter_cube(cube, *filter_);
    case PreprocessMethod::BackgroundSuppress: return suppress_background(cube, *background_);
  }
  throw std::logic_error("unknown preprocess method");
}

Preprocessor make_preprocessor(const PreprocessConfig& cfg, const CubeSource* backgrounds, std::uint64_t seed) {
  if (cfg.method != PreprocessMethod::BackgroundSuppress) return Preprocessor(cfg);
  if (!backgrounds || backgrounds->size() == 0) {
    throw std::invalid_argument("background suppression needs 0-person background cubes");
  }
  BackgroundAccumulator acc;
  for (std::size_t i = 0; i < backgrounds->size(); ++i) acc.add(backgrounds->load(i));
  return Preprocessor(cfg, std::make_shared<const BackgroundModel>(acc.fit(cfg.background_rank, seed)));
}

}  // namespace radarcount
