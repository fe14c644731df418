// Acceptance harness: nine go/no-go checks over the full toolkit, one
// PASS/FAIL line each. Exit code is the number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "eegbss/bss.hpp"
#include "eegbss/filter.hpp"
#include "eegbss/linalg.hpp"
#include "eegbss/metrics.hpp"
#include "eegbss/pipeline.hpp"
#include "eegbss/rng.hpp"
#include "eegbss/semisim.hpp"

using namespace eegbss;

namespace {

int g_fails = 0;

void report(bool ok, int n, const std::string& text) {
  std::printf("%s - criterion %d: %s\n", ok ? "PASS" : "FAIL", n, text.c_str());
  std::fflush(stdout);
  if (!ok) ++g_fails;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* spec, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, spec);
  std::vsnprintf(buf, sizeof buf, spec, ap);
  va_end(ap);
  return std::string(buf);
}

// ---- criteria 1-3 + 8: the Table-1 trend batch ----------------------------

const std::uint64_t kSimSeeds[5] = {2, 20, 21, 53, 57};

std::vector<GroundTruth> trend_batch() {
  SimConfig cfg;  // 19 ch, 10 s, 250 Hz, ratio 1.0
  cfg.n_bursts = 12;
  cfg.burst_channels = 6;
  std::vector<GroundTruth> batch;
  batch.reserve(5);
  for (std::uint64_t s : kSimSeeds) batch.push_back(gen_dataset_batch(s, 1, cfg)[0]);
  return batch;
}

struct TrendResult {
  std::vector<EvalRow> rows;
  std::string table;
  double secs = 0.0;
};

TrendResult run_trend() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<GroundTruth> batch = trend_batch();
  TrendResult out;
  out.rows = compare_methods(batch, {"iva", "ica", "cca"});
  out.table = render_table(out.rows, "csv");
  out.secs = seconds_since(t0);
  return out;
}

TrendResult criteria_1_2_3() {
  TrendResult run = run_trend();
  // rows sorted by (dataset_id, method_tag): cca, ica, iva per dataset
  double mean[3] = {0.0, 0.0, 0.0};  // cca, ica, iva
  double mean_snr[3] = {0.0, 0.0, 0.0};
  int iva_lowest = 0;
  bool all_ok = true;
  for (int d = 0; d < 5; ++d) {
    const EvalRow& cca = run.rows[(size_t)(3 * d + 0)];
    const EvalRow& ica = run.rows[(size_t)(3 * d + 1)];
    const EvalRow& iva = run.rows[(size_t)(3 * d + 2)];
    for (const EvalRow* r : {&cca, &ica, &iva})
      if (r->status != "ok") all_ok = false;
    mean[0] += cca.rmse / 5.0;
    mean[1] += ica.rmse / 5.0;
    mean[2] += iva.rmse / 5.0;
    mean_snr[0] += cca.snr_db / 5.0;
    mean_snr[1] += ica.snr_db / 5.0;
    mean_snr[2] += iva.snr_db / 5.0;
    if (iva.rmse < ica.rmse && iva.rmse < cca.rmse) ++iva_lowest;
  }
  const bool order = mean[2] < mean[1] && mean[1] < mean[0];
  report(all_ok && iva_lowest >= 4 && order && run.secs <= 120.0, 1,
         fmt("IVA lowest RMSE on %d/5 datasets; mean RMSE iva %.4f < ica %.4f < "
             "cca %.4f; %.1f s (budget 120)",
             iva_lowest, mean[2], mean[1], mean[0], run.secs));

  // criterion 2: every cell vs its contaminated baseline
  std::vector<GroundTruth> batch = trend_batch();
  int improved = 0;
  double worst_cell = 0.0, worst_base = 1e300;
  for (int d = 0; d < 5; ++d) {
    const double base = rmse(batch[(size_t)d].clean, batch[(size_t)d].contaminated);
    worst_base = std::min(worst_base, base);
    for (int m = 0; m < 3; ++m) {
      const double cell = run.rows[(size_t)(3 * d + m)].rmse;
      worst_cell = std::max(worst_cell, cell);
      if (cell < base) ++improved;
    }
  }
  report(improved >= 13, 2,
         fmt("%d/15 cells beat the contaminated baseline (worst cell %.4f, "
             "smallest baseline %.4f)",
             improved, worst_cell, worst_base));

  report(mean_snr[2] >= mean_snr[1] && mean_snr[1] >= mean_snr[0], 3,
         fmt("mean SNR iva %.3f dB >= ica %.3f dB >= cca %.3f dB", mean_snr[2],
             mean_snr[1], mean_snr[0]));
  return run;
}

// criterion 8: the full criterion-1 run, repeated, must be byte-identical
void criterion_8(const TrendResult& run) {
  {
    std::ofstream f("table.csv", std::ios::binary);
    f << run.table;
  }
  TrendResult rerun = run_trend();
  std::ifstream f("table.csv", std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  const bool identical = rerun.table == run.table && ss.str() == run.table;
  report(identical, 8,
         fmt("repeated run and table.csv byte-identical (%zu bytes)",
             run.table.size()));
}

// ---- criterion 4: Schur / sym_eig stress -----------------------------------

void sym3_eigenvalues(const Mat& a, double out[3]) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  if (p1 == 0.0) {
    out[0] = a(0, 0);
    out[1] = a(1, 1);
    out[2] = a(2, 2);
    std::sort(out, out + 3, std::greater<double>());
    return;
  }
  const double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                    (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Mat b(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b(i, j) = (a(i, j) - (i == j ? q : 0.0)) / p;
  double detb = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
  double r = std::min(1.0, std::max(-1.0, detb / 2.0));
  const double phi = std::acos(r) / 3.0;
  out[0] = q + 2.0 * p * std::cos(phi);
  out[2] = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  out[1] = 3.0 * q - out[0] - out[2];
}

void criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(99);
  double worst_res = 0.0, worst_orth = 0.0, worst_poly = 0.0;
  int small_cases = 0;
  bool ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    const int c = 2 + (int)rng.below(31);
    Mat a(c, c);
    for (int i = 0; i < c; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.gauss();
    SchurForm sf = schur_decompose(a);
    if (!sf.converged) ok = false;
    const Mat recon = matmul(sf.q, matmul(sf.t, transpose(sf.q)));
    const double rel = fro_norm(sub(a, recon)) / fro_norm(a);
    const double orth = fro_norm(sub(matmul(transpose(sf.q), sf.q), identity(c)));
    worst_res = std::max(worst_res, rel);
    worst_orth = std::max(worst_orth, orth / c);
    if (rel > 1e-9 || orth > 1e-10 * c) ok = false;

    if (c <= 3) {
      ++small_cases;
      SymEig e = sym_eig(a);
      double want[3];
      if (c == 2) {
        const double m = 0.5 * (a(0, 0) + a(1, 1));
        const double r = std::hypot(0.5 * (a(0, 0) - a(1, 1)), a(0, 1));
        want[0] = m + r;
        want[1] = m - r;
      } else {
        sym3_eigenvalues(a, want);
      }
      for (int i = 0; i < c; ++i) {
        const double err = std::fabs(e.values[(size_t)i] - want[i]);
        worst_poly = std::max(worst_poly, err);
        if (err > 1e-7) ok = false;
      }
    }
  }
  const double secs = seconds_since(t0);
  if (secs > 30.0) ok = false;
  report(ok, 4,
         fmt("200 symmetric matrices (2-32): worst residual/||A|| %.2e, worst "
             "orth defect/C %.2e, char-poly error %.2e over %d small cases; %.1f s",
             worst_res, worst_orth, worst_poly, small_cases, secs));
}

// ---- criterion 5: filter suite at fs = 500 ---------------------------------

void criterion_5() {
  BandpassSpec spec;
  spec.fs_hz = 500.0;
  BiquadCascade f = design_bandpass(spec);
  const double g_lo = std::abs(frequency_response(f, 1.0, 500.0));
  const double g_hi = std::abs(frequency_response(f, 70.0, 500.0));
  const double inv_sqrt2 = 0.7071067811865476;
  bool ok = std::fabs(g_lo - inv_sqrt2) <= 0.05 && std::fabs(g_hi - inv_sqrt2) <= 0.05;

  const double att_lo = -20.0 * std::log10(std::norm(frequency_response(f, 0.25, 500.0)));
  const double att_hi = -20.0 * std::log10(std::norm(frequency_response(f, 140.0, 500.0)));
  if (att_lo < 40.0 || att_hi < 40.0) ok = false;

  double worst_probe = 0.0;
  const int n = 5000;
  for (double fr : {1.0, 5.0, 10.0, 40.0, 60.0, 70.0, 100.0}) {
    std::vector<double> x((size_t)n);
    for (int t = 0; t < n; ++t) x[(size_t)t] = std::sin(2.0 * M_PI * fr * t / 500.0);
    std::vector<double> y = zero_phase_channel(f, x);
    double num = 0.0, den = 0.0;
    for (int t = 1000; t < n - 1000; ++t) {
      num += y[(size_t)t] * y[(size_t)t];
      den += x[(size_t)t] * x[(size_t)t];
    }
    const double measured = std::sqrt(num / den);
    const double want = std::norm(frequency_response(f, fr, 500.0));
    worst_probe = std::max(worst_probe, std::fabs(measured - want));
  }
  if (worst_probe > 0.02) ok = false;
  report(ok, 5,
         fmt("edge gains %.4f/%.4f (1/sqrt2 +- 0.05), two-pass attenuation "
             "%.1f/%.1f dB (>= 40), worst sine-probe error %.2e (<= 0.02)",
             g_lo, g_hi, att_lo, att_hi, worst_probe));
}

// ---- criterion 6: separation suite ------------------------------------------

Recording wrap(Mat data, double fs = 250.0) {
  Recording r;
  r.labels = default_labels(data.rows);
  r.fs_hz = fs;
  r.data = std::move(data);
  return r;
}

void criterion_6() {
  int sobi_ok = 0, ica_ok = 0;
  double sobi_worst = 0.0, ica_worst = 0.0;
  const Mat a = {{1.0, 0.5}, {0.3, 1.0}};
  for (int seed = 1; seed <= 10; ++seed) {
    Rng rng((std::uint64_t)seed);
    const int n = 20000;
    Mat s(2, n);
    double x1 = 0.0, x2 = 0.0;
    for (int t = 0; t < n; ++t) {
      x1 = 0.9 * x1 + rng.gauss();
      x2 = -0.5 * x2 + rng.gauss();
      s(0, t) = x1;
      s(1, t) = x2;
    }
    DemixingModel m = sobi(wrap(matmul(a, s)));
    const double am = amari_index(matmul(matmul(m.per_dataset_w[0], m.whiten[0].v), a));
    sobi_worst = std::max(sobi_worst, am);
    if (am <= 0.05) ++sobi_ok;
  }
  const Mat a2 = {{2.0, 1.0}, {1.0, 1.0}};
  for (int seed = 1; seed <= 10; ++seed) {
    Rng rng((std::uint64_t)(100 + seed));
    const int n = 20000;
    Mat s(2, n);
    for (int t = 0; t < n; ++t) {
      s(0, t) = rng.uniform() - 0.5;
      s(1, t) = rng.uniform() - 0.5;
    }
    DemixingModel m = fastica(wrap(matmul(a2, s)), "tanh", 1e-7, 200, (std::uint64_t)seed);
    const double am = amari_index(matmul(matmul(m.per_dataset_w[0], m.whiten[0].v), a2));
    ica_worst = std::max(ica_worst, am);
    if (am <= 0.05) ++ica_ok;
  }
  // Gaussian pair: FastICA must flag the indeterminacy
  bool warned = false;
  {
    Rng rng(42);
    const int n = 20000;
    Mat s(2, n);
    for (int t = 0; t < n; ++t) {
      s(0, t) = rng.gauss();
      s(1, t) = rng.gauss();
    }
    DemixingModel m = fastica(wrap(matmul(a2, s)), "tanh", 1e-7, 200, 5);
    for (const std::string& w : m.warnings)
      if (w.find("Gaussian") != std::string::npos) warned = true;
  }
  report(sobi_ok >= 9 && ica_ok >= 9 && warned, 6,
         fmt("SOBI %d/10 seeds (worst Amari %.4f), FastICA %d/10 (worst %.4f), "
             "Gaussian warning %s",
             sobi_ok, sobi_worst, ica_ok, ica_worst, warned ? "raised" : "missing"));
}

// ---- criterion 7: permutation consistency ----------------------------------

double mean_abs_corr(const Mat& y1, const Mat& y2) {
  const int c = y1.rows, n = y1.cols;
  double acc = 0.0;
  for (int i = 0; i < c; ++i) {
    double m1 = 0.0, m2 = 0.0;
    for (int t = 0; t < n; ++t) {
      m1 += y1(i, t);
      m2 += y2(i, t);
    }
    m1 /= n;
    m2 /= n;
    double s12 = 0.0, s11 = 0.0, s22 = 0.0;
    for (int t = 0; t < n; ++t) {
      s12 += (y1(i, t) - m1) * (y2(i, t) - m2);
      s11 += (y1(i, t) - m1) * (y1(i, t) - m1);
      s22 += (y2(i, t) - m2) * (y2(i, t) - m2);
    }
    acc += std::fabs(s12 / std::sqrt(s11 * s22));
  }
  return acc / c;
}

double laplace_draw(Rng& rng) {
  const double u = rng.uniform() - 0.5;
  return (u < 0.0 ? 1.0 : -1.0) * std::log(1.0 - 2.0 * std::fabs(u)) *
         0.70710678118654752;
}

void criterion_7() {
  const int kSeeds[10] = {1, 2, 5, 6, 7, 8, 11, 12, 13, 14};
  const int n = 2000, c = 3;
  const Mat mixing = {{1.0, 0.5, 0.3}, {0.4, 1.0, 0.5}, {0.3, 0.4, 1.0}};
  int wins = 0;
  double iva_mean_all = 0.0, ica_mean_all = 0.0;
  for (int seed : kSeeds) {
    Rng rng((std::uint64_t)seed);
    Mat s1(c, n), s2(c, n);
    std::vector<double> p1(c, 0.0), pp1(c, 0.0), p2(c, 0.0), pp2(c, 0.0);
    for (int t = 0; t < n; ++t) {
      for (int i = 0; i < c; ++i) {
        const double e1 = laplace_draw(rng);
        const double e2 = 0.9 * e1 + std::sqrt(0.19) * laplace_draw(rng);
        double v1, v2;
        if (i == 0) {
          v1 = 0.5 * p1[0] + e1;
          v2 = 0.5 * p2[0] + e2;
        } else if (i == 1) {
          v1 = 0.68 * p1[1] - 0.36 * pp1[1] + e1;
          v2 = 0.68 * p2[1] - 0.36 * pp2[1] + e2;
        } else {
          v1 = 0.4 * p1[2] + 0.2 * pp1[2] + e1;
          v2 = 0.4 * p2[2] + 0.2 * pp2[2] + e2;
        }
        pp1[(size_t)i] = p1[(size_t)i];
        p1[(size_t)i] = v1;
        s1(i, t) = v1;
        pp2[(size_t)i] = p2[(size_t)i];
        p2[(size_t)i] = v2;
        s2(i, t) = v2;
      }
    }
    std::vector<Recording> segs{wrap(matmul(mixing, s1)), wrap(matmul(mixing, s2))};
    DemixingModel mi = iva(segs);
    Mat y1 = matmul(mi.per_dataset_w[0], whiten_apply(mi.whiten[0], segs[0].data));
    Mat y2 = matmul(mi.per_dataset_w[1], whiten_apply(mi.whiten[1], segs[1].data));
    const double iva_corr = mean_abs_corr(y1, y2);

    DemixingModel f1 = fastica(segs[0], "tanh", 1e-7, 200, (std::uint64_t)(1000 + seed));
    DemixingModel f2 = fastica(segs[1], "tanh", 1e-7, 200, (std::uint64_t)(2000 + seed));
    Mat z1 = matmul(f1.per_dataset_w[0], whiten_apply(f1.whiten[0], segs[0].data));
    Mat z2 = matmul(f2.per_dataset_w[0], whiten_apply(f2.whiten[0], segs[1].data));
    const double ica_corr = mean_abs_corr(z1, z2);

    iva_mean_all += iva_corr / 10.0;
    ica_mean_all += ica_corr / 10.0;
    if (iva_corr >= ica_corr) ++wins;
  }
  report(wins >= 8, 7,
         fmt("IVA cross-segment |corr| beats per-segment FastICA on %d/10 seeds "
             "(means %.3f vs %.3f)",
             wins, iva_mean_all, ica_mean_all));
}

// ---- criterion 9: speed bounds ----------------------------------------------

void criterion_9() {
  Rng rng(123);
  Mat a(19, 19);
  for (int i = 0; i < 19; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.gauss();
  const auto t0 = std::chrono::steady_clock::now();
  SchurForm sf = schur_decompose(a);
  const double schur_ms = seconds_since(t0) * 1e3;

  SimConfig cfg;
  cfg.seed = 2;
  cfg.n_bursts = 12;
  cfg.burst_channels = 6;
  std::vector<GroundTruth> one = gen_dataset_batch(2, 1, cfg);
  const auto t1 = std::chrono::steady_clock::now();
  RemoveResult rr = remove_artifacts(one[0].contaminated, "iva");
  const double remove_s = seconds_since(t1);

  report(sf.converged && schur_ms <= 100.0 && remove_s <= 10.0 &&
             rr.cleaned.samples() > 0,
         9,
         fmt("19x19 Schur %.3f ms (<= 100), remove --method iva %.2f s (<= 10)",
             schur_ms, remove_s));
}

}  // namespace

int main() {
  TrendResult run = criteria_1_2_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8(run);
  criterion_9();
  std::printf("%s (%d/9 criteria)\n", g_fails == 0 ? "ACCEPTED" : "REJECTED",
              9 - g_fails);
  return g_fails;
}
