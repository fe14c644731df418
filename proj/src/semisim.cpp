#include "eegbss/semisim.hpp"

#include <cmath>
#include <stdexcept>

#include "eegbss/filter.hpp"
#include "eegbss/linalg.hpp"
#include "eegbss/rng.hpp"

namespace eegbss {

namespace {

constexpr std::uint64_t kCleanStream = 0x5EED0001ull;
constexpr std::uint64_t kEmgStream = 0x5EED0002ull;
constexpr double kPi = 3.14159265358979323846;

void check_cfg(const SimConfig& cfg) {
  if (cfg.n_channels < 1) throw std::invalid_argument("sim: n_channels must be >= 1");
  if (!(cfg.fs_hz > 0.0)) throw std::invalid_argument("sim: invalid sampling rate");
  if (!(cfg.contamination_ratio > 0.0))
    throw std::invalid_argument("sim: contamination_ratio must be > 0");
  if (cfg.n_bursts < 0) throw std::invalid_argument("sim: n_bursts must be >= 0");
  if (cfg.burst_channels < 1 || cfg.burst_channels > cfg.n_channels)
    throw std::invalid_argument("sim: burst_channels out of range");
  const double n = cfg.duration_s * cfg.fs_hz;
  if (!(n >= 2.0 * cfg.n_channels))
    throw std::invalid_argument("sim: duration too short for channel count");
}

double rms(const double* x, int n) {
  double s = 0.0;
  for (int t = 0; t < n; ++t) s += x[t] * x[t];
  return std::sqrt(s / n);
}

// Rhythm amplitudes sweep across the montage (slow waves taper, beta grows)
// so sources are spatially distinguishable; channel means keep the base
// band weights 1.0 / 0.8 / 1.2 / 0.5.
double band_gain(int band, double t) {
  switch (band) {
    case 0: return 1.0 - 0.45 * t;  // delta
    case 1: return 1.0 - 0.35 * t;  // theta
    case 2: return 1.0 - 0.30 * t;  // alpha
    default: return 1.0 + 1.55 * t;  // beta
  }
}

}  // namespace

Recording gen_clean_eeg(const SimConfig& cfg) {
  check_cfg(cfg);
  const int c = cfg.n_channels;
  const int n = (int)std::llround(cfg.duration_s * cfg.fs_hz);
  Rng rng(derive_seed(cfg.seed, kCleanStream));

  const double band_edges[4][2] = {{1.0, 4.0}, {4.0, 8.0}, {8.0, 13.0}, {13.0, 30.0}};
  const double base_w[4] = {1.0, 0.8, 1.2, 0.5};
  BiquadCascade filt[4];
  for (int b = 0; b < 4; ++b) {
    BandpassSpec spec;
    spec.low_cut_hz = band_edges[b][0];
    spec.high_cut_hz = band_edges[b][1];
    spec.order = 8;
    spec.fs_hz = cfg.fs_hz;
    filt[b] = design_bandpass(spec);
  }

  Mat lat(c, n);
  std::vector<double> noise((size_t)n);
  for (int i = 0; i < c; ++i) {
    const double t = (c == 1) ? 0.0 : -1.0 + 2.0 * i / (c - 1);
    double* dst = lat.row(i);
    for (int b = 0; b < 4; ++b) {
      for (int k = 0; k < n; ++k) noise[(size_t)k] = rng.gauss();
      std::vector<double> x = zero_phase_channel(filt[b], noise);
      const double r = rms(x.data(), n);
      if (r < 1e-12) throw std::runtime_error("sim: degenerate band process");
      const double w = base_w[b] * band_gain(b, t) / r;
      for (int k = 0; k < n; ++k) dst[k] += w * x[(size_t)k];
    }
  }

  // well-conditioned mixing: orthogonal * diag(geomspace 1..1/18) * orthogonal
  Mat u = random_orthogonal(rng, c);
  Mat v = random_orthogonal(rng, c);
  Mat a(c, c);
  for (int i = 0; i < c; ++i) {
    const double s = (c == 1) ? 1.0 : std::exp(std::log(1.0 / 18.0) * i / (c - 1));
    for (int j = 0; j < c; ++j) a(i, j) = s * v(j, i);
  }
  a = matmul(u, a);

  Recording rec;
  rec.labels = default_labels(c);
  rec.fs_hz = cfg.fs_hz;
  rec.data = matmul(a, lat);

  const double r = rms(rec.data.a.data(), c * n);
  if (r < 1e-12) throw std::runtime_error("sim: degenerate output");
  const double g = 10.0 / r;
  for (double& x : rec.data.a) x *= g;
  return rec;
}

Recording gen_emg_artifact(const SimConfig& cfg, int channels, int samples) {
  check_cfg(cfg);
  if (channels < 1 || samples < 2)
    throw std::invalid_argument("gen_emg_artifact: invalid shape");
  const int c = channels;
  const int n = samples;
  const int bc = std::min(cfg.burst_channels, c);
  Rng rng(derive_seed(cfg.seed, kEmgStream));

  Recording rec;
  rec.labels = default_labels(c);
  rec.fs_hz = cfg.fs_hz;
  rec.data = Mat(c, n);
  if (cfg.n_bursts == 0) return rec;

  BandpassSpec spec;
  spec.low_cut_hz = 20.0;
  spec.high_cut_hz = std::min(70.0, 0.45 * cfg.fs_hz);
  spec.order = 4;
  spec.fs_hz = cfg.fs_hz;
  const BiquadCascade filt = design_bandpass(spec);

  std::vector<std::pair<int, int>> placed;  // [start, end) per burst
  for (int b = 0; b < cfg.n_bursts; ++b) {
    const double dur = rng.uniform(0.5, 2.0);
    int len = (int)std::llround(dur * cfg.fs_hz);
    if (len < 2) len = 2;
    const int keep = std::min(len, n);  // truncate bursts longer than the recording

    int start = 0;
    if (keep < n) {
      for (int attempt = 0; attempt < 100; ++attempt) {
        start = (int)rng.below((std::uint64_t)(n - keep + 1));
        bool clash = false;
        for (const auto& p : placed)
          if (start < p.second && p.first < start + keep) clash = true;
        if (!clash) break;  // dense plans may overlap after 100 tries
      }
    }
    placed.emplace_back(start, start + keep);

    const int first_ch = (int)rng.below((std::uint64_t)(c - bc + 1));
    std::vector<double> topo((size_t)bc);
    for (int j = 0; j < bc; ++j) topo[(size_t)j] = rng.uniform(0.2, 1.0);

    std::vector<double> noise((size_t)len);
    for (int k = 0; k < len; ++k) noise[(size_t)k] = rng.gauss();
    std::vector<double> burst = zero_phase_channel(filt, noise);
    for (int k = 0; k < len; ++k) {
      const double env = 0.5 * (1.0 - std::cos(2.0 * kPi * k / (len - 1)));
      burst[(size_t)k] *= env;
    }

    for (int j = 0; j < bc; ++j) {
      double* dst = rec.data.row(first_ch + j);
      for (int k = 0; k < keep; ++k) dst[start + k] += topo[(size_t)j] * burst[(size_t)k];
    }
  }
  return rec;
}

GroundTruth mix(const Recording& clean, const Recording& artifact, double ratio) {
  validate(clean);
  validate(artifact);
  if (!clean.data.same_shape(artifact.data) || clean.labels != artifact.labels ||
      clean.fs_hz != artifact.fs_hz)
    throw std::invalid_argument("mix: clean and artifact recordings do not match");
  if (ratio < 0.0) throw std::invalid_argument("mix: negative ratio");

  double sa = 0.0, sc = 0.0;
  long long support = 0;
  const size_t total = clean.data.a.size();
  for (size_t i = 0; i < total; ++i) {
    const double av = artifact.data.a[i];
    if (av != 0.0) {
      sa += av * av;
      sc += clean.data.a[i] * clean.data.a[i];
      ++support;
    }
  }

  GroundTruth gt;
  gt.clean = clean;
  gt.artifact = artifact;
  if (ratio == 0.0) {
    if (support != 0)
      throw std::invalid_argument("mix: ratio 0 requires a zero artifact");
    gt.contaminated = clean;
    return gt;
  }
  if (support == 0) throw std::invalid_argument("mix: zero artifact");
  const double rms_a = std::sqrt(sa / support);
  const double rms_c = std::sqrt(sc / support);
  if (rms_c < 1e-12)
    throw std::invalid_argument("mix: clean signal vanishes on artifact support");
  const double lam = ratio * rms_c / rms_a;

  for (double& v : gt.artifact.data.a) v *= lam;
  gt.contaminated = clean;
  for (size_t i = 0; i < total; ++i)
    gt.contaminated.data.a[i] = clean.data.a[i] + gt.artifact.data.a[i];

  double sa2 = 0.0;
  for (size_t i = 0; i < total; ++i) {
    const double av = gt.artifact.data.a[i];
    if (av != 0.0) sa2 += av * av;
  }
  const double achieved = std::sqrt(sa2 / support) / rms_c;
  if (std::fabs(achieved - ratio) > 1e-9)
    throw std::runtime_error("mix: ratio invariant violated");
  return gt;
}

std::vector<GroundTruth> gen_dataset_batch(std::uint64_t base_seed, int count,
                                           const SimConfig& cfg) {
  if (count < 1) throw std::invalid_argument("gen_dataset_batch: count must be >= 1");
  std::vector<GroundTruth> out;
  out.reserve((size_t)count);
  for (int k = 0; k < count; ++k) {
    SimConfig c = cfg;
    c.seed = base_seed + (std::uint64_t)k;
    Recording clean = gen_clean_eeg(c);
    Recording art = gen_emg_artifact(c, clean.channels(), clean.samples());
    out.push_back(mix(clean, art, c.contamination_ratio));
  }
  return out;
}

}  // namespace eegbss
