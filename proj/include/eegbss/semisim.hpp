#pragma once
#include <cstdint>
#include <vector>

#include "eegbss/recording.hpp"

namespace eegbss {

struct SimConfig {
  std::uint64_t seed = 1;
  int n_channels = 19;
  double fs_hz = 250.0;
  double duration_s = 10.0;
  double contamination_ratio = 1.0;  // target RMS(artifact)/RMS(clean) on burst support
  int n_bursts = 3;
  int burst_channels = 6;
};

struct GroundTruth {
  Recording clean;
  Recording artifact;
  Recording contaminated;
};

// Sum of four band-limited Gaussian processes per source (delta/theta/alpha/
// beta), spatially mixed by a random well-conditioned matrix, overall RMS
// 10 uV. Deterministic in cfg.seed.
Recording gen_clean_eeg(const SimConfig& cfg);

// Burst EMG: 20-70 Hz noise under raised-cosine envelopes, projected onto
// contiguous channel groups with positive topographies. Zero outside bursts.
Recording gen_emg_artifact(const SimConfig& cfg, int channels, int samples);

// Rescales artifact so RMS(artifact)/RMS(clean) over the artifact support
// equals ratio, then assembles clean + artifact.
GroundTruth mix(const Recording& clean, const Recording& artifact, double ratio);

std::vector<GroundTruth> gen_dataset_batch(std::uint64_t base_seed, int count,
                                           const SimConfig& cfg);

}  // namespace eegbss
