#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "eegbss/bss.hpp"
#include "eegbss/filter.hpp"
#include "eegbss/recording.hpp"

namespace eegbss {

struct IdentifyConfig {
  double autocorr_threshold = 0.90;   // reject below
  double band_ratio_threshold = 1.0;  // reject above
  double max_reject_fraction = 0.5;   // cap, fraction of C
};

struct PipelineReport {
  std::string method_tag;
  std::vector<std::vector<int>> rejected;  // per dataset, ascending indices
  std::vector<double> lag1_autocorr;       // per source (SCV mean for iva)
  std::vector<double> band_ratio;
  double t_filter_ms = 0.0;
  double t_separate_ms = 0.0;
  double t_extract_ms = 0.0;
  double t_identify_ms = 0.0;
  double t_reconstruct_ms = 0.0;
  double t_total_ms = 0.0;
  int n_segments = 1;
  int dropped_samples = 0;  // iva trailing remainder
  std::vector<std::string> warnings;
  bool converged = true;
  int iterations = 0;
};

std::string report_to_json(const PipelineReport& rep);

// Reject source n iff lag1_autocorr[n] < tau_a OR band_ratio[n] > tau_b,
// capped at floor(max_reject_fraction * C) components (worst band_ratio
// first). One decision per source index, applied to every dataset.
std::vector<std::vector<int>> identify_muscle_components(const SourceSet& srcs,
                                                         const IdentifyConfig& cfg);

// x_k = unwhiten(A_k * S_k) with rejected source rows zeroed.
std::vector<Recording> reconstruct_clean(const DemixingModel& model,
                                         const SourceSet& srcs,
                                         const std::vector<std::vector<int>>& rejected);

struct RemoveResult {
  Recording cleaned;
  PipelineReport report;
};

// Full pipeline: band-pass -> (segment for iva) -> separate -> extract ->
// identify -> reconstruct. method is one of {iva, ica, cca, sobi}; "ica"
// runs FastICA. fcfg.fs_hz is taken from the recording. For iva the output
// covers n_segments * floor(N / n_segments) samples; the remainder is
// dropped and reported.
RemoveResult remove_artifacts(const Recording& rec, const std::string& method,
                              BandpassSpec fcfg = BandpassSpec{},
                              const IdentifyConfig& icfg = IdentifyConfig{},
                              std::uint64_t seed = 0, int n_segments = 4);

}  // namespace eegbss
