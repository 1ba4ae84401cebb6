#pragma once

#include <complex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "radarcount/cube.hpp"

namespace radarcount {

/// Second-order section, a0 normalised to 1:
///   H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  std::complex<double> response(std::complex<double> z) const;
  /// Roots of z^2 + a1 z + a2.
  std::pair<std::complex<double>, std::complex<double>> poles() const;
  double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

enum class FilterKind { Lowpass, Highpass, Bandpass };

struct FilterDesign {
  FilterKind kind = FilterKind::Lowpass;
  int order = 0;          // prototype order; a band-pass has 2 * order poles
  double low_hz = 0.0;    // cutoff for low/high-pass, lower edge for band-pass
  double high_hz = 0.0;   // upper edge for band-pass, unused otherwise
  double sample_rate = 0.0;
};

struct IirFilter {
  std::vector<Biquad> sections;
  FilterDesign design;

  std::complex<double> response_at(double freq_hz) const;
  double gain_at(double freq_hz) const { return std::abs(response_at(freq_hz)); }
  std::vector<std::complex<double>> poles() const;
  bool is_stable() const;
  /// Reflective padding used by the zero-phase filter: 3 * (2 * sections + 1),
  /// less trailing zero taps.
  int padlen() const;
};

/// Digital Butterworth filters: analog prototype, frequency transform and
/// bilinear transform with the cutoffs prewarped, realised as cascaded biquads.
IirFilter design_butterworth_lowpass(int order, double cutoff_hz, double sample_rate);
IirFilter design_butterworth_highpass(int order, double cutoff_hz, double sample_rate);
IirFilter design_butterworth_bandpass(int order, double low_hz, double high_hz, double sample_rate);

enum class BlendWiring {
  Cascade,   // y2 = stage2(stage1(x))
  Parallel,  // y2 = stage2(x)
};

/// Drift removal in two stages, output = weight1 * y1 + weight2 * y2 with
/// y1 = stage1(x).
struct TwoStageHighpass {
  IirFilter stage1;
  IirFilter stage2;
  double weight1 = 0.7;
  double weight2 = 0.3;
  BlendWiring wiring = BlendWiring::Cascade;
};

/// Stage 1: 8th-order high-pass at 0.05 Hz; stage 2: 2nd-order high-pass at 0.1 Hz.
TwoStageHighpass design_two_stage_highpass(double sample_rate = kSampleRateHz,
                                           BlendWiring wiring = BlendWiring::Cascade);

using TemporalFilter = std::variant<IirFilter, TwoStageHighpass>;

int required_frames(const TemporalFilter& f);

/// Direct-form-II-transposed cascade. `zi` holds two states per section and
/// is updated in place when non-empty.
Eigen::VectorXd sosfilt(const IirFilter& f, const Eigen::Ref<const Eigen::VectorXd>& x,
                        std::vector<double>* zi = nullptr);

/// Steady-state section states for a unit step input.
std::vector<double> sosfilt_zi(const IirFilter& f);

/// Zero-phase forward-backward filtering with reflective edge padding and
/// steady-state initial conditions.
Eigen::VectorXd filtfilt(const IirFilter& f, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd apply_filter(const TemporalFilter& f, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Every cell's time series filtered independently; no renormalisation.
Eigen::MatrixXd filter_cube_raw(const RadarCube& cube, const TemporalFilter& f);
/// filter_cube_raw followed by per-cube min-max scaling onto [0, 1].
RadarCube filter_cube(const RadarCube& cube, const TemporalFilter& f);

}  // namespace radarcount
