#include "eegbss/filter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace eegbss {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_spec(const BandpassSpec& s) {
  if (!(s.fs_hz > 0.0)) throw std::invalid_argument("design_bandpass: invalid sampling rate");
  if (!(s.low_cut_hz > 0.0 && s.low_cut_hz < s.high_cut_hz &&
        s.high_cut_hz < 0.5 * s.fs_hz))
    throw std::invalid_argument("design_bandpass: cutoffs must satisfy 0 < low < high < fs/2");
  if (s.order != 2 && s.order != 4 && s.order != 6 && s.order != 8)
    throw std::invalid_argument("design_bandpass: order must be one of {2,4,6,8}");
}

}  // namespace

BiquadCascade design_bandpass(const BandpassSpec& spec) {
  check_spec(spec);
  const int n = spec.order;
  const double fs = spec.fs_hz;
  // pre-warp the band edges onto the analog axis
  const double w1 = 2.0 * fs * std::tan(kPi * spec.low_cut_hz / fs);
  const double w2 = 2.0 * fs * std::tan(kPi * spec.high_cut_hz / fs);
  const double bw = w2 - w1;
  const double w0 = std::sqrt(w1 * w2);

  // low-pass prototype poles on the unit circle, left half plane
  std::vector<std::complex<double>> zp;
  for (int k = 0; k < n; ++k) {
    std::complex<double> p = std::polar(1.0, kPi * (2.0 * k + n + 1.0) / (2.0 * n));
    // band-pass transform: s^2 - bw*p*s + w0^2 = 0
    std::complex<double> h = 0.5 * bw * p;
    std::complex<double> d = std::sqrt(h * h - w0 * w0);
    for (std::complex<double> s : {h + d, h - d}) {
      // bilinear map to the z plane
      zp.push_back((2.0 * fs + s) / (2.0 * fs - s));
    }
  }
  // keep one pole of each conjugate pair, in a fixed order
  std::vector<std::complex<double>> up;
  for (const auto& p : zp)
    if (p.imag() > 0.0) up.push_back(p);
  if ((int)up.size() != n)
    throw std::runtime_error("design_bandpass: pole pairing failed");
  std::sort(up.begin(), up.end(), [](const std::complex<double>& a, const std::complex<double>& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });

  BiquadCascade f;
  f.pad = 9 * n;
  for (const auto& p : up) {
    Biquad s;
    s.a1 = -2.0 * p.real();
    s.a2 = std::norm(p);
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;  // zeros at z = +1 and z = -1
    if (!(s.a2 < 1.0 && std::fabs(s.a1) < 1.0 + s.a2))
      throw std::runtime_error("design_bandpass: unstable section");
    f.sections.push_back(s);
  }

  // normalize so the gain is exactly 1 at the (digital) center frequency
  const double f0 = (fs / kPi) * std::atan(w0 / (2.0 * fs));
  const double mag = std::abs(frequency_response(f, f0, fs));
  const double g = std::pow(1.0 / mag, 1.0 / n);
  for (auto& s : f.sections) {
    s.b0 *= g;
    s.b1 *= g;
    s.b2 *= g;
  }
  return f;
}

std::complex<double> frequency_response(const BiquadCascade& filt, double f_hz,
                                        double fs_hz) {
  if (!(fs_hz > 0.0)) throw std::invalid_argument("frequency_response: invalid sampling rate");
  if (f_hz < 0.0 || f_hz > 0.5 * fs_hz)
    throw std::invalid_argument("frequency_response: frequency outside [0, fs/2]");
  const std::complex<double> zi = std::polar(1.0, -2.0 * kPi * f_hz / fs_hz);
  const std::complex<double> zi2 = zi * zi;
  std::complex<double> h(1.0, 0.0);
  for (const auto& s : filt.sections)
    h *= (s.b0 + s.b1 * zi + s.b2 * zi2) / (1.0 + s.a1 * zi + s.a2 * zi2);
  return h;
}

namespace {

// steady-state filter state for a unit step, per section, scaled by the
// cumulative DC gain of the preceding sections
std::vector<std::array<double, 2>> step_state(const BiquadCascade& f) {
  std::vector<std::array<double, 2>> zi(f.sections.size());
  double scale = 1.0;
  for (size_t k = 0; k < f.sections.size(); ++k) {
    const Biquad& s = f.sections[k];
    const double den = 1.0 + s.a1 + s.a2;
    const double num = s.b0 + s.b1 + s.b2;
    const double dc = (num == 0.0) ? 0.0 : num / den;
    zi[k][0] = scale * (dc - s.b0);
    zi[k][1] = scale * (s.b2 - s.a2 * dc);
    scale *= dc;
  }
  return zi;
}

// transposed direct form II cascade, state preloaded as x[0] * zi
void sosfilt(const BiquadCascade& f, const std::vector<std::array<double, 2>>& zi,
             std::vector<double>& x) {
  const double x0 = x[0];
  for (size_t k = 0; k < f.sections.size(); ++k) {
    const Biquad& s = f.sections[k];
    double s1 = zi[k][0] * x0;
    double s2 = zi[k][1] * x0;
    for (size_t t = 0; t < x.size(); ++t) {
      const double xin = x[t];
      const double y = s.b0 * xin + s1;
      s1 = s.b1 * xin - s.a1 * y + s2;
      s2 = s.b2 * xin - s.a2 * y;
      x[t] = y;
    }
  }
}

}  // namespace

std::vector<double> zero_phase_channel(const BiquadCascade& filt,
                                       const std::vector<double>& x) {
  const int n = (int)x.size();
  const int pad = filt.pad;
  const int min_len = std::max(6 * (int)filt.sections.size(), pad) + 1;
  if (n < min_len)
    throw std::invalid_argument("zero_phase_channel: recording too short for padding");

  // odd reflection about both end samples
  std::vector<double> ext(n + 2 * pad);
  for (int i = 0; i < pad; ++i) ext[i] = 2.0 * x[0] - x[pad - i];
  std::copy(x.begin(), x.end(), ext.begin() + pad);
  for (int i = 0; i < pad; ++i) ext[pad + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];

  const auto zi = step_state(filt);
  auto fwd = [&](std::vector<double> v) {
    sosfilt(filt, zi, v);
    return v;
  };
  auto bwd = [&](std::vector<double> v) {
    std::reverse(v.begin(), v.end());
    sosfilt(filt, zi, v);
    std::reverse(v.begin(), v.end());
    return v;
  };
  const std::vector<double> ya = bwd(fwd(ext));
  const std::vector<double> yb = fwd(bwd(ext));

  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = 0.5 * (ya[pad + i] + yb[pad + i]);
  return y;
}

Recording apply_zero_phase(const BiquadCascade& filt, const Recording& rec) {
  validate(rec);
  Recording out = rec;
  const int c = rec.channels();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < c; ++i) {
    std::vector<double> ch(rec.data.row(i), rec.data.row(i) + rec.samples());
    std::vector<double> y = zero_phase_channel(filt, ch);
    std::copy(y.begin(), y.end(), out.data.row(i));
  }
  return out;
}

}  // namespace eegbss
