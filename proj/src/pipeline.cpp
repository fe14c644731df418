#include "eegbss/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace eegbss {

namespace {

void check_icfg(const IdentifyConfig& cfg) {
  if (!(cfg.autocorr_threshold > 0.0 && cfg.autocorr_threshold < 1.0))
    throw std::invalid_argument("identify: autocorr_threshold outside (0,1)");
  if (!(cfg.band_ratio_threshold > 0.0))
    throw std::invalid_argument("identify: band_ratio_threshold must be > 0");
  if (!(cfg.max_reject_fraction > 0.0 && cfg.max_reject_fraction <= 1.0))
    throw std::invalid_argument("identify: max_reject_fraction outside (0,1]");
}

double ms_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

[[noreturn]] void rethrow_staged(const char* stage, const std::exception& e) {
  throw std::runtime_error(std::string(stage) + ": " + e.what());
}

}  // namespace

std::vector<std::vector<int>> identify_muscle_components(const SourceSet& srcs,
                                                         const IdentifyConfig& cfg) {
  check_icfg(cfg);
  if (srcs.sources.empty()) throw std::invalid_argument("identify: empty source set");
  const int c = srcs.sources[0].rows;
  if ((int)srcs.lag1_autocorr.size() != c || (int)srcs.band_ratio.size() != c)
    throw std::invalid_argument("identify: diagnostics missing");

  std::vector<int> rejected;
  for (int i = 0; i < c; ++i)
    if (srcs.lag1_autocorr[(size_t)i] < cfg.autocorr_threshold ||
        srcs.band_ratio[(size_t)i] > cfg.band_ratio_threshold)
      rejected.push_back(i);

  const int cap = (int)std::floor(cfg.max_reject_fraction * c);
  if ((int)rejected.size() > cap) {  // keep the worst spectral offenders
    std::stable_sort(rejected.begin(), rejected.end(), [&](int a, int b) {
      return srcs.band_ratio[(size_t)a] > srcs.band_ratio[(size_t)b];
    });
    rejected.resize((size_t)cap);
    std::sort(rejected.begin(), rejected.end());
  }
  return std::vector<std::vector<int>>(srcs.sources.size(), rejected);
}

std::vector<Recording> reconstruct_clean(const DemixingModel& model,
                                         const SourceSet& srcs,
                                         const std::vector<std::vector<int>>& rejected) {
  const int k = model.n_datasets();
  if ((int)srcs.sources.size() != k || (int)rejected.size() != k)
    throw std::invalid_argument("reconstruct_clean: dataset count mismatch");
  const int c = model.per_dataset_w[0].rows;

  std::vector<Recording> out;
  out.reserve((size_t)k);
  for (int s = 0; s < k; ++s) {
    for (int idx : rejected[(size_t)s])
      if (idx < 0 || idx >= c)
        throw std::out_of_range("reconstruct_clean: rejected index out of range");
    Mat kept = srcs.sources[(size_t)s];
    for (int idx : rejected[(size_t)s])
      std::fill(kept.row(idx), kept.row(idx) + kept.cols, 0.0);
    Mat z = matmul(model.per_dataset_a[(size_t)s], kept);
    Recording rec;
    rec.labels = model.labels;
    rec.fs_hz = model.fs_hz;
    rec.data = unwhiten(model.whiten[(size_t)s], z);
    out.push_back(std::move(rec));
  }
  return out;
}

RemoveResult remove_artifacts(const Recording& rec, const std::string& method,
                              BandpassSpec fcfg, const IdentifyConfig& icfg,
                              std::uint64_t seed, int n_segments) {
  validate(rec);
  check_icfg(icfg);
  if (method != "iva" && method != "ica" && method != "cca" && method != "sobi")
    throw std::invalid_argument("remove_artifacts: unknown method " + method);
  const auto t_start = std::chrono::steady_clock::now();

  RemoveResult res;
  PipelineReport& rep = res.report;
  rep.method_tag = method;

  fcfg.fs_hz = rec.fs_hz;
  Recording filtered;
  {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      filtered = apply_zero_phase(design_bandpass(fcfg), rec);
    } catch (const std::exception& e) {
      rethrow_staged("filter", e);
    }
    rep.t_filter_ms = ms_since(t0);
  }

  std::vector<Recording> data;
  if (method == "iva") {
    if (n_segments < 2)
      throw std::invalid_argument("separate: iva needs n_segments >= 2");
    const int len = filtered.samples() / n_segments;
    if (len < 2 * filtered.channels())
      throw std::invalid_argument("separate: recording too short for K segments");
    SegmentPlan plan;
    plan.n_segments = n_segments;
    plan.segment_len = len;
    data = segment(filtered, plan);
    rep.n_segments = n_segments;
    rep.dropped_samples = filtered.samples() - n_segments * len;
  } else {
    data.push_back(filtered);
  }

  DemixingModel model;
  {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if (method == "iva")
        model = iva(data, "laplace", 0.1, 1e-4, 100, seed);
      else if (method == "ica")
        model = fastica(filtered, "tanh", 1e-7, 200, seed);
      else if (method == "cca")
        model = cca_bss(filtered);
      else
        model = sobi(filtered);
    } catch (const std::exception& e) {
      rethrow_staged("separate", e);
    }
    rep.t_separate_ms = ms_since(t0);
  }

  SourceSet srcs;
  {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      srcs = extract_sources(model, data);
    } catch (const std::exception& e) {
      rethrow_staged("extract", e);
    }
    rep.t_extract_ms = ms_since(t0);
  }

  {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      rep.rejected = identify_muscle_components(srcs, icfg);
    } catch (const std::exception& e) {
      rethrow_staged("identify", e);
    }
    rep.t_identify_ms = ms_since(t0);
  }

  {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      std::vector<Recording> parts = reconstruct_clean(model, srcs, rep.rejected);
      if (method == "iva") {
        Recording joined;
        joined.labels = rec.labels;
        joined.fs_hz = rec.fs_hz;
        const int len = parts[0].samples();
        joined.data = Mat(rec.channels(), (int)parts.size() * len);
        for (size_t s = 0; s < parts.size(); ++s)
          for (int i = 0; i < rec.channels(); ++i)
            std::copy(parts[s].data.row(i), parts[s].data.row(i) + len,
                      joined.data.row(i) + (int)s * len);
        res.cleaned = std::move(joined);
      } else {
        res.cleaned = std::move(parts[0]);
        res.cleaned.labels = rec.labels;
      }
    } catch (const std::exception& e) {
      rethrow_staged("reconstruct", e);
    }
    rep.t_reconstruct_ms = ms_since(t0);
  }

  rep.lag1_autocorr = srcs.lag1_autocorr;
  rep.band_ratio = srcs.band_ratio;
  rep.warnings = model.warnings;
  rep.converged = model.converged;
  rep.iterations = model.iterations;
  rep.t_total_ms = ms_since(t_start);
  return res;
}

std::string report_to_json(const PipelineReport& rep) {
  nlohmann::ordered_json j;
  j["method"] = rep.method_tag;
  j["n_segments"] = rep.n_segments;
  j["dropped_samples"] = rep.dropped_samples;
  j["rejected"] = rep.rejected;
  j["diagnostics"]["lag1_autocorr"] = rep.lag1_autocorr;
  j["diagnostics"]["band_ratio"] = rep.band_ratio;
  j["timings_ms"]["filter"] = rep.t_filter_ms;
  j["timings_ms"]["separate"] = rep.t_separate_ms;
  j["timings_ms"]["extract"] = rep.t_extract_ms;
  j["timings_ms"]["identify"] = rep.t_identify_ms;
  j["timings_ms"]["reconstruct"] = rep.t_reconstruct_ms;
  j["timings_ms"]["total"] = rep.t_total_ms;
  j["converged"] = rep.converged;
  j["iterations"] = rep.iterations;
  j["warnings"] = rep.warnings;
  return j.dump(2);
}

}  // namespace eegbss
