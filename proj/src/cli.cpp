#include "eegbss/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eegbss/metrics.hpp"
#include "eegbss/pipeline.hpp"
#include "eegbss/plot.hpp"
#include "eegbss/semisim.hpp"

namespace eegbss {

namespace {

// "a..b" (inclusive) or comma list "a,b,c"
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const std::uint64_t lo = std::stoull(text.substr(0, dots));
    const std::uint64_t hi = std::stoull(text.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("seed range is empty: " + text);
    if (hi - lo > 10000) throw std::invalid_argument("seed range too large: " + text);
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t comma = std::min(text.find(',', pos), text.size());
    const std::string tok = text.substr(pos, comma - pos);
    if (tok.empty()) throw std::invalid_argument("bad seed list: " + text);
    out.push_back(std::stoull(tok));
    pos = comma + 1;
  }
  return out;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t comma = std::min(text.find(',', pos), text.size());
    out.push_back(text.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"EEG muscle-artifact removal: band-pass + BSS (IVA/ICA/CCA/SOBI) "
               "+ component rejection"};
  app.require_subcommand(1);

  SimConfig sim;
  BandpassSpec band;
  IdentifyConfig icfg;
  int n_segments = 4;
  std::uint64_t seed = 1;
  std::string method = "iva";
  std::string in_path, out_path, overlay_path, report_path, clean_path;
  std::string format = "csv", channels_arg, seeds_arg;
  int count = 5;
  int dataset_id = 1;

  auto add_sim_flags = [&](CLI::App* c) {
    c->add_option("--channels", sim.n_channels, "channel count")->check(CLI::Range(1, 32));
    c->add_option("--fs", sim.fs_hz, "sampling rate in Hz")->check(CLI::PositiveNumber);
    c->add_option("--duration", sim.duration_s, "length in seconds")->check(CLI::PositiveNumber);
    c->add_option("--ratio", sim.contamination_ratio, "artifact/clean RMS ratio")
        ->check(CLI::PositiveNumber);
    c->add_option("--bursts", sim.n_bursts, "EMG burst count")->check(CLI::NonNegativeNumber);
    c->add_option("--burst-channels", sim.burst_channels, "channels per burst")
        ->check(CLI::Range(1, 32));
  };
  auto add_band_flags = [&](CLI::App* c) {
    c->add_option("--low", band.low_cut_hz, "low cutoff Hz")->check(CLI::PositiveNumber);
    c->add_option("--high", band.high_cut_hz, "high cutoff Hz")->check(CLI::PositiveNumber);
    c->add_option("--order", band.order, "filter order")
        ->check(CLI::IsMember({2, 4, 6, 8}));
  };
  auto add_identify_flags = [&](CLI::App* c) {
    c->add_option("--autocorr-threshold", icfg.autocorr_threshold,
                  "reject sources below this lag-1 autocorrelation")
        ->check(CLI::Range(1e-9, 1.0));
    c->add_option("--band-ratio-threshold", icfg.band_ratio_threshold,
                  "reject sources above this 30-70/1-30 Hz power ratio")
        ->check(CLI::PositiveNumber);
    c->add_option("--max-reject-fraction", icfg.max_reject_fraction,
                  "cap on rejected fraction of components")
        ->check(CLI::Range(1e-9, 1.0));
  };
  const std::vector<std::string> kMethods = {"iva", "ica", "cca", "sobi"};

  CLI::App* c_sim = app.add_subcommand("simulate", "write a seeded GroundTruth triple");
  c_sim->add_option("--seed", seed, "generator seed");
  c_sim->add_option("--out", out_path, "output prefix")->required();
  add_sim_flags(c_sim);

  CLI::App* c_filt = app.add_subcommand("filter", "band-pass a recording (zero phase)");
  c_filt->add_option("--in", in_path, "input recording (.csv/.json pair)")->required();
  c_filt->add_option("--out", out_path, "output recording path")->required();
  add_band_flags(c_filt);

  CLI::App* c_rem = app.add_subcommand("remove", "run the artifact-removal pipeline");
  c_rem->add_option("--in", in_path, "input recording")->required();
  c_rem->add_option("--out", out_path, "cleaned recording path")->required();
  c_rem->add_option("--method", method, "BSS method")
      ->check(CLI::IsMember(kMethods))
      ->required();
  c_rem->add_option("--seed", seed, "method seed");
  c_rem->add_option("--segments", n_segments, "IVA segment count")->check(CLI::Range(2, 64));
  c_rem->add_option("--report", report_path, "pipeline report JSON path");
  add_band_flags(c_rem);
  add_identify_flags(c_rem);

  CLI::App* c_eval = app.add_subcommand("evaluate", "RMSE/SNR of an output vs ground truth");
  c_eval->add_option("--clean", clean_path, "ground-truth clean recording")->required();
  c_eval->add_option("--in", in_path, "recording to score")->required();
  c_eval->add_option("--method", method, "method tag for the row");
  c_eval->add_option("--dataset-id", dataset_id, "dataset id for the row");
  c_eval->add_option("--format", format, "csv or markdown")
      ->check(CLI::IsMember({"csv", "markdown"}));

  CLI::App* c_cmp = app.add_subcommand("compare", "multi-method table on seeded datasets");
  std::string methods_arg = "iva,ica,cca";
  c_cmp->add_option("--seeds", seeds_arg, "seed range a..b or list a,b,c");
  c_cmp->add_option("--count", count, "dataset count (seeds base..base+count-1)")
      ->check(CLI::PositiveNumber);
  c_cmp->add_option("--base-seed", seed, "first seed when using --count");
  c_cmp->add_option("--methods", methods_arg, "comma list from {iva,ica,cca,sobi}");
  c_cmp->add_option("--out", out_path, "table output path (default stdout)");
  c_cmp->add_option("--format", format, "csv or markdown")
      ->check(CLI::IsMember({"csv", "markdown"}));
  c_cmp->add_option("--segments", n_segments, "IVA segment count")->check(CLI::Range(2, 64));
  add_sim_flags(c_cmp);
  add_band_flags(c_cmp);
  add_identify_flags(c_cmp);

  CLI::App* c_plot = app.add_subcommand("plot", "stacked-channel SVG, optional overlay");
  c_plot->add_option("--in", in_path, "recording to draw")->required();
  c_plot->add_option("--overlay", overlay_path, "second recording, dashed");
  c_plot->add_option("--channels", channels_arg, "comma list of channel names (default all)");
  c_plot->add_option("--out", out_path, "SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // help on stdout, exit 0
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << app.help() << "\n";
    return 2;
  }

  try {
    if (c_sim->parsed()) {
      sim.seed = seed;
      Recording clean = gen_clean_eeg(sim);
      Recording art = gen_emg_artifact(sim, clean.channels(), clean.samples());
      GroundTruth gt = mix(clean, art, sim.contamination_ratio);
      save_recording(gt.clean, out_path + "_clean");
      save_recording(gt.artifact, out_path + "_artifact");
      save_recording(gt.contaminated, out_path + "_contaminated");
      std::cerr << "wrote " << out_path << "_{clean,artifact,contaminated}\n";
    } else if (c_filt->parsed()) {
      Recording rec = load_recording(in_path);
      band.fs_hz = rec.fs_hz;
      save_recording(apply_zero_phase(design_bandpass(band), rec), out_path);
    } else if (c_rem->parsed()) {
      Recording rec = load_recording(in_path);
      RemoveResult res = remove_artifacts(rec, method, band, icfg, seed, n_segments);
      save_recording(res.cleaned, out_path);
      if (report_path.empty()) report_path = out_path + "_report.json";
      write_text(report_path, report_to_json(res.report) + "\n");
      for (const std::string& w : res.report.warnings) std::cerr << "warning: " << w << "\n";
    } else if (c_eval->parsed()) {
      Recording clean = load_recording(clean_path);
      Recording rec = load_recording(in_path);
      if (rec.samples() > clean.samples())
        throw std::runtime_error("evaluate: output longer than clean reference");
      if (rec.samples() < clean.samples()) {
        Recording cropped;
        cropped.labels = clean.labels;
        cropped.fs_hz = clean.fs_hz;
        cropped.data = Mat(clean.channels(), rec.samples());
        for (int i = 0; i < clean.channels(); ++i)
          std::copy(clean.data.row(i), clean.data.row(i) + rec.samples(),
                    cropped.data.row(i));
        clean = cropped;
      }
      EvalRow row;
      row.dataset_id = dataset_id;
      row.method_tag = c_eval->count("--method") ? method : "output";
      row.rmse = rmse(clean, rec);
      row.snr_db = snr_db(clean, rec);
      if (std::isinf(row.snr_db)) row.status = "perfect";
      std::cout << render_table({row}, format);
    } else if (c_cmp->parsed()) {
      std::vector<std::uint64_t> seeds;
      if (!seeds_arg.empty())
        seeds = parse_seeds(seeds_arg);
      else
        for (int i = 0; i < count; ++i) seeds.push_back(seed + (std::uint64_t)i);
      std::vector<std::string> methods = split_commas(methods_arg);
      for (const std::string& m : methods)
        if (std::find(kMethods.begin(), kMethods.end(), m) == kMethods.end()) {
          std::cerr << "unknown method '" << m << "'; valid: iva, ica, cca, sobi\n";
          return 2;
        }
      std::vector<GroundTruth> batch;
      for (std::uint64_t s : seeds) {
        SimConfig cfg = sim;
        cfg.seed = s;
        Recording clean = gen_clean_eeg(cfg);
        Recording art = gen_emg_artifact(cfg, clean.channels(), clean.samples());
        batch.push_back(mix(clean, art, cfg.contamination_ratio));
      }
      const std::string table =
          render_table(compare_methods(batch, methods, band, icfg, n_segments), format);
      if (out_path.empty())
        std::cout << table;
      else
        write_text(out_path, table);
    } else if (c_plot->parsed()) {
      Recording rec = load_recording(in_path);
      Recording over;
      const bool has_overlay = !overlay_path.empty();
      if (has_overlay) over = load_recording(overlay_path);
      std::vector<std::string> channels;
      if (!channels_arg.empty()) channels = split_commas(channels_arg);
      plot_svg(rec, has_overlay ? &over : nullptr, channels, out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace eegbss
