#pragma once
#include <complex>
#include <vector>

#include "eegbss/recording.hpp"

namespace eegbss {

struct BandpassSpec {
  double low_cut_hz = 1.0;
  double high_cut_hz = 70.0;
  int order = 4;       // analog prototype order, one of {2,4,6,8}
  double fs_hz = 250.0;
};

struct Biquad {
  double b0, b1, b2;  // feedforward
  double a1, a2;      // feedback (a0 = 1)
};

struct BiquadCascade {
  std::vector<Biquad> sections;
  int pad = 0;  // reflection padding per side for zero-phase application
};

// Butterworth band-pass: analog prototype -> band-pass transform -> bilinear
// with pre-warping, factored into stable second-order sections. Single-pass
// gain at each cut-off is 1/sqrt(2) by construction.
BiquadCascade design_bandpass(const BandpassSpec& spec);

std::complex<double> frequency_response(const BiquadCascade& filt, double f_hz,
                                        double fs_hz);

// Forward-backward filtering with odd-reflection padding. The two pass
// orders (forward-first and backward-first) are averaged, which makes the
// operation exactly time-reversal symmetric.
std::vector<double> zero_phase_channel(const BiquadCascade& filt,
                                       const std::vector<double>& x);

Recording apply_zero_phase(const BiquadCascade& filt, const Recording& rec);

}  // namespace eegbss
