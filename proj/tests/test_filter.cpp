#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "eegbss/filter.hpp"
#include "eegbss/rng.hpp"

using namespace eegbss;

TEST_CASE("design_bandpass structure and stability") {
  BandpassSpec spec;  // 1-70 Hz, order 4, fs 250
  BiquadCascade f = design_bandpass(spec);
  CHECK(f.sections.size() == 4);  // order-n prototype -> n biquads after BP transform
  CHECK(f.pad == 36);             // 9 * order
  for (const Biquad& s : f.sections) {
    CHECK(s.a2 < 1.0);  // poles inside the unit circle
    CHECK(std::fabs(s.a1) < 1.0 + s.a2);
  }
}

TEST_CASE("single-pass gain is 1/sqrt(2) at both cut-offs") {
  for (double fs : {250.0, 500.0}) {
    BandpassSpec spec;
    spec.fs_hz = fs;
    BiquadCascade f = design_bandpass(spec);
    const double edge = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(frequency_response(f, 1.0, fs)) ==
          doctest::Approx(edge).epsilon(1e-9));
    CHECK(std::abs(frequency_response(f, 70.0, fs)) ==
          doctest::Approx(edge).epsilon(1e-9));
  }
}

TEST_CASE("stopband attenuation") {
  BandpassSpec spec;
  spec.fs_hz = 500.0;
  BiquadCascade f = design_bandpass(spec);
  // two-pass (zero-phase) power gain = |H|^4; demand >= 40 dB down
  double g_low = std::norm(frequency_response(f, 0.25, 500.0));
  double g_high = std::norm(frequency_response(f, 140.0, 500.0));
  CHECK(-20.0 * std::log10(g_low) >= 40.0);
  CHECK(-20.0 * std::log10(g_high) >= 40.0);
  CHECK(std::abs(frequency_response(f, 0.0, 500.0)) <= 1e-12);  // exact DC zero
}

TEST_CASE("zero-phase filtering is exactly time-reversal symmetric") {
  BandpassSpec spec;
  BiquadCascade f = design_bandpass(spec);
  Rng rng(7);
  std::vector<double> x(500);
  for (double& v : x) v = rng.gauss();
  std::vector<double> y = zero_phase_channel(f, x);
  std::vector<double> xr(x.rbegin(), x.rend());
  std::vector<double> yr = zero_phase_channel(f, xr);
  std::reverse(yr.begin(), yr.end());
  REQUIRE(y.size() == x.size());
  for (size_t i = 0; i < y.size(); ++i) CHECK(y[i] == yr[i]);
}

TEST_CASE("sine probes match the two-pass magnitude response") {
  BandpassSpec spec;
  BiquadCascade f = design_bandpass(spec);
  const int n = 2500;
  for (double fr : {5.0, 10.0, 40.0, 60.0}) {
    std::vector<double> s((size_t)n);
    for (int t = 0; t < n; ++t) s[(size_t)t] = std::sin(2.0 * M_PI * fr * t / 250.0);
    std::vector<double> sf = zero_phase_channel(f, s);
    double num = 0.0, den = 0.0;
    for (int t = 500; t < n - 500; ++t) {  // interior, away from edge transients
      num += sf[(size_t)t] * sf[(size_t)t];
      den += s[(size_t)t] * s[(size_t)t];
    }
    double h = std::abs(frequency_response(f, fr, 250.0));
    CHECK(std::sqrt(num / den) == doctest::Approx(h * h).epsilon(1e-3));
  }
}

TEST_CASE("zero-phase output of a constant is ~zero") {
  BandpassSpec spec;
  BiquadCascade f = design_bandpass(spec);
  std::vector<double> x(400, 3.7);
  std::vector<double> y = zero_phase_channel(f, x);
  for (double v : y) CHECK(std::fabs(v) < 1e-9);
}

TEST_CASE("recording too short for padding") {
  BandpassSpec spec;  // pad 36 -> need at least 37 samples
  BiquadCascade f = design_bandpass(spec);
  std::vector<double> ok(37, 0.0), bad(36, 0.0);
  CHECK_NOTHROW(zero_phase_channel(f, ok));
  CHECK_THROWS_WITH_AS(zero_phase_channel(f, bad),
                       "zero_phase_channel: recording too short for padding",
                       std::invalid_argument);
}

TEST_CASE("apply_zero_phase preserves shape and metadata") {
  Recording rec;
  rec.fs_hz = 250.0;
  rec.labels = {"A", "B"};
  rec.data = Mat(2, 300);
  Rng rng(3);
  for (double& v : rec.data.a) v = rng.gauss();
  BandpassSpec spec;
  Recording out = apply_zero_phase(design_bandpass(spec), rec);
  CHECK(out.channels() == 2);
  CHECK(out.samples() == 300);
  CHECK(out.fs_hz == 250.0);
  CHECK(out.labels == rec.labels);
  // matches the per-channel path
  std::vector<double> row0(rec.data.row(0), rec.data.row(0) + 300);
  std::vector<double> y0 = zero_phase_channel(design_bandpass(spec), row0);
  for (int t = 0; t < 300; ++t) CHECK(out.data(0, t) == y0[(size_t)t]);
}

TEST_CASE("bad band specs are rejected") {
  BandpassSpec s1;
  s1.low_cut_hz = 0.0;
  CHECK_THROWS_WITH_AS(design_bandpass(s1),
                       "design_bandpass: cutoffs must satisfy 0 < low < high < fs/2",
                       std::invalid_argument);
  BandpassSpec s2;
  s2.high_cut_hz = s2.low_cut_hz;
  CHECK_THROWS_AS(design_bandpass(s2), std::invalid_argument);
  BandpassSpec s3;
  s3.high_cut_hz = 125.0;  // = fs/2
  CHECK_THROWS_AS(design_bandpass(s3), std::invalid_argument);
  BandpassSpec s4;
  s4.order = 3;
  CHECK_THROWS_WITH_AS(design_bandpass(s4),
                       "design_bandpass: order must be one of {2,4,6,8}",
                       std::invalid_argument);
  BandpassSpec s5;
  s5.fs_hz = 0.0;
  CHECK_THROWS_AS(design_bandpass(s5), std::invalid_argument);
}

TEST_CASE("frequency_response rejects out-of-range queries") {
  BandpassSpec spec;
  BiquadCascade f = design_bandpass(spec);
  CHECK_THROWS_WITH_AS(frequency_response(f, -1.0, 250.0),
                       "frequency_response: frequency outside [0, fs/2]",
                       std::invalid_argument);
  CHECK_THROWS_AS(frequency_response(f, 126.0, 250.0), std::invalid_argument);
  CHECK_THROWS_WITH_AS(frequency_response(f, 10.0, 0.0),
                       "frequency_response: invalid sampling rate",
                       std::invalid_argument);
}

TEST_CASE("all supported orders design cleanly") {
  for (int order : {2, 4, 6, 8}) {
    BandpassSpec spec;
    spec.order = order;
    BiquadCascade f = design_bandpass(spec);
    CHECK((int)f.sections.size() == order);
    CHECK(f.pad == 9 * order);
    CHECK(std::abs(frequency_response(f, 1.0, 250.0)) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  }
}
