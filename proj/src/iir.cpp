#include "radarcount/iir.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "radarcount/normalize.hpp"

namespace radarcount {
namespace {

using cd = std::complex<double>;

struct Zpk {
  std::vector<cd> zeros;
  std::vector<cd> poles;
  double gain = 1.0;
};

Zpk butterworth_prototype(int order) {
  Zpk zpk;
  for (int k = 0; k < order; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order);
    zpk.poles.push_back(std::polar(1.0, theta));
  }
  return zpk;
}

double prewarp(double freq_hz, double sample_rate) {
  return 2.0 * sample_rate * std::tan(std::numbers::pi * freq_hz / sample_rate);
}

Zpk lowpass_to_lowpass(const Zpk& proto, double wc) {
  Zpk out;
  for (auto p : proto.poles) out.poles.push_back(wc * p);
  out.gain = proto.gain * std::pow(wc, static_cast<double>(proto.poles.size()));
  return out;
}

Zpk lowpass_to_highpass(const Zpk& proto, double wc) {
  Zpk out;
  cd prod = 1.0;
  for (auto p : proto.poles) {
    out.poles.push_back(wc / p);
    prod *= -p;
  }
  out.zeros.assign(proto.poles.size(), cd{0.0, 0.0});
  out.gain = proto.gain * (1.0 / prod).real();
  return out;
}

Zpk lowpass_to_bandpass(const Zpk& proto, double w0, double bw) {
  Zpk out;
  for (auto p : proto.poles) {
    const cd half = p * (bw / 2.0);
    const cd disc = std::sqrt(half * half - w0 * w0);
    out.poles.push_back(half + disc);
    out.poles.push_back(half - disc);
  }
  out.zeros.assign(proto.poles.size(), cd{0.0, 0.0});
  out.gain = proto.gain * std::pow(bw, static_cast<double>(proto.poles.size()));
  return out;
}

Zpk bilinear(const Zpk& analog, double sample_rate) {
  const double fs2 = 2.0 * sample_rate;
  Zpk out;
  cd num = 1.0, den = 1.0;
  for (auto z : analog.zeros) {
    out.zeros.push_back((fs2 + z) / (fs2 - z));
    num *= fs2 - z;
  }
  for (auto p : analog.poles) {
    out.poles.push_back((fs2 + p) / (fs2 - p));
    den *= fs2 - p;
  }
  // Zeros at infinity map to Nyquist.
  while (out.zeros.size() < out.poles.size()) out.zeros.emplace_back(-1.0, 0.0);
  out.gain = analog.gain * (num / den).real();
  return out;
}

// Pairs conjugate poles with zeros; all filters here have real zeros at +1 or -1.
std::vector<Biquad> to_sections(const Zpk& digital) {
  std::vector<cd> upper;
  std::vector<double> real_poles;
  for (auto p : digital.poles) {
    if (std::abs(p.imag()) <= 1e-12 * std::max(1.0, std::abs(p))) {
      real_poles.push_back(p.real());
    } else if (p.imag() > 0.0) {
      upper.push_back(p);
    }
  }
  std::vector<double> zeros;
  for (auto z : digital.zeros) zeros.push_back(z.real());
  // Zeros at +1 first so band-pass sections each get one of +1 and -1.
  std::sort(zeros.begin(), zeros.end(), std::greater<>());
  std::vector<double> ordered_zeros;
  {
    std::vector<double> plus, minus;
    for (double z : zeros) (z > 0.0 ? plus : minus).push_back(z);
    std::size_t i = 0, j = 0;
    while (i < plus.size() || j < minus.size()) {
      if (i < plus.size()) ordered_zeros.push_back(plus[i++]);
      if (j < minus.size()) ordered_zeros.push_back(minus[j++]);
    }
    // Homogeneous zero sets (pure high/low-pass) pair with themselves.
    if (plus.empty() || minus.empty()) ordered_zeros = zeros;
  }

  std::vector<Biquad> sections;
  std::size_t zi = 0;
  auto take_zero = [&]() -> std::optional<double> {
    if (zi < ordered_zeros.size()) return ordered_zeros[zi++];
    return std::nullopt;
  };
  // Sort by pole radius so the most resonant section comes last.
  std::sort(upper.begin(), upper.end(), [](cd a, cd b) { return std::abs(a) < std::abs(b); });
  for (auto p : upper) {
    Biquad s;
    s.a1 = -2.0 * p.real();
    s.a2 = std::norm(p);
    const auto z1 = take_zero();
    const auto z2 = take_zero();
    const double r1 = z1.value_or(0.0), r2 = z2.value_or(0.0);
    s.b0 = 1.0;
    s.b1 = -(z1 ? r1 : 0.0) - (z2 ? r2 : 0.0);
    s.b2 = (z1 && z2) ? r1 * r2 : 0.0;
    sections.push_back(s);
  }
  for (std::size_t i = 0; i < real_poles.size(); i += 2) {
    Biquad s;
    if (i + 1 < real_poles.size()) {
      s.a1 = -(real_poles[i] + real_poles[i + 1]);
      s.a2 = real_poles[i] * real_poles[i + 1];
      const auto z1 = take_zero();
      const auto z2 = take_zero();
      s.b1 = -z1.value_or(0.0) - z2.value_or(0.0);
      s.b2 = z1.value_or(0.0) * z2.value_or(0.0);
    } else {
      s.a1 = -real_poles[i];
      const auto z1 = take_zero();
      s.b1 = -z1.value_or(0.0);
    }
    sections.push_back(s);
  }
  if (sections.empty()) throw std::logic_error("filter has no poles");

  // Spread the overall gain evenly.
  const double g = digital.gain;
  const double per = std::pow(std::abs(g), 1.0 / static_cast<double>(sections.size()));
  for (auto& s : sections) {
    s.b0 *= per;
    s.b1 *= per;
    s.b2 *= per;
  }
  if (g < 0.0) {
    sections.front().b0 = -sections.front().b0;
    sections.front().b1 = -sections.front().b1;
    sections.front().b2 = -sections.front().b2;
  }
  return sections;
}

void check_cutoff(double f, double sample_rate) {
  const double nyquist = sample_rate / 2.0;
  if (!(f > 0.0 && f < nyquist)) {
    throw std::invalid_argument("cutoff " + std::to_string(f) + " Hz outside (0, Nyquist limit " +
                                std::to_string(nyquist) + " Hz)");
  }
}

void check_order(int order) {
  if (order < 1) throw std::invalid_argument("filter order must be >= 1");
}

Eigen::VectorXd reflect_pad(const Eigen::Ref<const Eigen::VectorXd>& x, int pad) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd ext(n + 2 * pad);
  for (int i = 0; i < pad; ++i) ext(i) = x(pad - i);
  ext.segment(pad, n) = x;
  for (int i = 0; i < pad; ++i) ext(pad + n + i) = x(n - 2 - i);
  return ext;
}

}  // namespace

std::complex<double> Biquad::response(std::complex<double> z) const {
  const cd zi = 1.0 / z;
  return (b0 + zi * (b1 + zi * b2)) / (1.0 + zi * (a1 + zi * a2));
}

std::pair<std::complex<double>, std::complex<double>> Biquad::poles() const {
  const cd disc = std::sqrt(cd{a1 * a1 - 4.0 * a2, 0.0});
  return {(-a1 + disc) / 2.0, (-a1 - disc) / 2.0};
}

std::complex<double> IirFilter::response_at(double freq_hz) const {
  const cd z = std::polar(1.0, 2.0 * std::numbers::pi * freq_hz / design.sample_rate);
  cd h = 1.0;
  for (const auto& s : sections) h *= s.response(z);
  return h;
}

std::vector<std::complex<double>> IirFilter::poles() const {
  std::vector<cd> out;
  for (const auto& s : sections) {
    auto [p1, p2] = s.poles();
    out.push_back(p1);
    // First-order sections carry a spurious root at the origin.
    if (s.a2 != 0.0 || s.a1 == 0.0) out.push_back(p2);
  }
  return out;
}

bool IirFilter::is_stable() const {
  return std::all_of(sections.begin(), sections.end(), [](const Biquad& s) {
    auto [p1, p2] = s.poles();
    return std::abs(p1) < 1.0 && std::abs(p2) < 1.0;
  });
}

int IirFilter::padlen() const {
  int taps = 2 * static_cast<int>(sections.size()) + 1;
  const auto zero_b2 = std::count_if(sections.begin(), sections.end(), [](const Biquad& s) { return s.b2 == 0.0; });
  const auto zero_a2 = std::count_if(sections.begin(), sections.end(), [](const Biquad& s) { return s.a2 == 0.0; });
  taps -= static_cast<int>(std::min(zero_b2, zero_a2));
  return 3 * taps;
}

IirFilter design_butterworth_lowpass(int order, double cutoff_hz, double sample_rate) {
  check_order(order);
  check_cutoff(cutoff_hz, sample_rate);
  const auto analog = lowpass_to_lowpass(butterworth_prototype(order), prewarp(cutoff_hz, sample_rate));
  return {to_sections(bilinear(analog, sample_rate)), {FilterKind::Lowpass, order, cutoff_hz, 0.0, sample_rate}};
}

IirFilter design_butterworth_highpass(int order, double cutoff_hz, double sample_rate) {
  check_order(order);
  check_cutoff(cutoff_hz, sample_rate);
  const auto analog = lowpass_to_highpass(butterworth_prototype(order), prewarp(cutoff_hz, sample_rate));
  return {to_sections(bilinear(analog, sample_rate)), {FilterKind::Highpass, order, cutoff_hz, 0.0, sample_rate}};
}

IirFilter design_butterworth_bandpass(int order, double low_hz, double high_hz, double sample_rate) {
  check_order(order);
  check_cutoff(low_hz, sample_rate);
  check_cutoff(high_hz, sample_rate);
  if (!(low_hz < high_hz)) throw std::invalid_argument("band-pass requires low < high");
  const double wl = prewarp(low_hz, sample_rate);
  const double wh = prewarp(high_hz, sample_rate);
  const auto analog = lowpass_to_bandpass(butterworth_prototype(order), std::sqrt(wl * wh), wh - wl);
  return {to_sections(bilinear(analog, sample_rate)), {FilterKind::Bandpass, order, low_hz, high_hz, sample_rate}};
}

TwoStageHighpass design_two_stage_highpass(double sample_rate, BlendWiring wiring) {
  TwoStageHighpass f;
  f.stage1 = design_butterworth_highpass(8, 0.05, sample_rate);
  f.stage2 = design_butterworth_highpass(2, 0.1, sample_rate);
  f.wiring = wiring;
  return f;
}

int required_frames(const TemporalFilter& f) {
  return std::visit(
      [](const auto& filt) -> int {
        using T = std::decay_t<decltype(filt)>;
        if constexpr (std::is_same_v<T, IirFilter>) {
          return filt.padlen() + 1;
        } else {
          return std::max(filt.stage1.padlen(), filt.stage2.padlen()) + 1;
        }
      },
      f);
}

Eigen::VectorXd sosfilt(const IirFilter& f, const Eigen::Ref<const Eigen::VectorXd>& x, std::vector<double>* zi) {
  std::vector<double> local(2 * f.sections.size(), 0.0);
  std::vector<double>& state = (zi && !zi->empty()) ? *zi : local;
  if (state.size() != 2 * f.sections.size()) throw std::invalid_argument("sosfilt: state size mismatch");
  Eigen::VectorXd y = x;
  for (std::size_t k = 0; k < f.sections.size(); ++k) {
    const auto& s = f.sections[k];
    double z1 = state[2 * k], z2 = state[2 * k + 1];
    for (Eigen::Index n = 0; n < y.size(); ++n) {
      const double in = y(n);
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      y(n) = out;
    }
    state[2 * k] = z1;
    state[2 * k + 1] = z2;
  }
  return y;
}

std::vector<double> sosfilt_zi(const IirFilter& f) {
  std::vector<double> zi;
  double scale = 1.0;
  for (const auto& s : f.sections) {
    const double g = s.dc_gain();
    const double y = g * scale;
    const double z2 = s.b2 * scale - s.a2 * y;
    const double z1 = (s.b1 + s.b2) * scale - (s.a1 + s.a2) * y;
    zi.push_back(z1);
    zi.push_back(z2);
    scale = y;
  }
  return zi;
}

Eigen::VectorXd filtfilt(const IirFilter& f, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const int pad = f.padlen();
  if (x.size() <= pad) {
    throw std::invalid_argument("filtfilt: series of " + std::to_string(x.size()) + " samples is too short, need > " +
                                std::to_string(pad));
  }
  const Eigen::VectorXd ext = reflect_pad(x, pad);
  const auto zi = sosfilt_zi(f);

  auto scaled = [&](double x0) {
    std::vector<double> z = zi;
    for (auto& v : z) v *= x0;
    return z;
  };
  auto state = scaled(ext(0));
  Eigen::VectorXd y = sosfilt(f, ext, &state);
  Eigen::VectorXd rev = y.reverse();
  state = scaled(rev(0));
  y = sosfilt(f, rev, &state).reverse();
  return y.segment(pad, x.size());
}

Eigen::VectorXd apply_filter(const TemporalFilter& f, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return std::visit(
      [&](const auto& filt) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(filt)>;
        if constexpr (std::is_same_v<T, IirFilter>) {
          return filtfilt(filt, x);
        } else {
          const Eigen::VectorXd y1 = filtfilt(filt.stage1, x);
          const Eigen::VectorXd y2 = filtfilt(filt.stage2, filt.wiring == BlendWiring::Cascade ? y1 : Eigen::VectorXd(x));
          return filt.weight1 * y1 + filt.weight2 * y2;
        }
      },
      f);
}

Eigen::MatrixXd filter_cube_raw(const RadarCube& cube, const TemporalFilter& f) {
  if (cube.frames() < required_frames(f)) {
    throw std::invalid_argument("filter_cube: " + std::to_string(cube.frames()) + " frames, filter needs at least " +
                                std::to_string(required_frames(f)));
  }
  const Eigen::MatrixXd x = cube.amplitudes().cast<double>();
  Eigen::MatrixXd y(x.rows(), x.cols());
  for (Eigen::Index k = 0; k < x.cols(); ++k) y.col(k) = apply_filter(f, x.col(k));
  return y;
}

RadarCube filter_cube(const RadarCube& cube, const TemporalFilter& f) {
  const Eigen::MatrixXd y = filter_cube_raw(cube, f);
  return RadarCube(minmax_to_unit(y), cube.range_bins(), cube.azimuth_bins(), cube.meta);
}

}  // namespace radarcount
