// Timing harness: serial vs OpenMP kernels, the Schur eigensolver at montage
// size, and one full pipeline invocation.
#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "eegbss/linalg.hpp"
#include "eegbss/pipeline.hpp"
#include "eegbss/rng.hpp"
#include "eegbss/semisim.hpp"

using namespace eegbss;
using clock_type = std::chrono::steady_clock;

static double ms_since(clock_type::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

template <class F>
static double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = clock_type::now();
    f();
    best = std::min(best, ms_since(t0));
  }
  return best;
}

int main() {
#ifdef _OPENMP
  std::printf("openmp: %d threads\n", omp_get_max_threads());
#else
  std::printf("openmp: disabled\n");
#endif

  Rng rng(42);
  const int c = 19, n = 20000;
  Mat a(c, n), b(n, c);
  for (double& v : a.a) v = rng.gauss();
  for (double& v : b.a) v = rng.gauss();

  Mat prod_s, prod_p;
  const double t_mm_serial = best_of(5, [&] { prod_s = matmul_serial(a, b); });
  const double t_mm_par = best_of(5, [&] { prod_p = matmul(a, b); });
  std::printf("matmul 19x20000 * 20000x19: serial %.2f ms, parallel %.2f ms (max |diff| %.3g)\n",
              t_mm_serial, t_mm_par, max_abs(sub(prod_s, prod_p)));

  Mat sym(c, c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j <= i; ++j) sym(i, j) = sym(j, i) = rng.gauss();
  SchurForm sf;
  const double t_schur = best_of(10, [&] { sf = schur_decompose(sym); });
  std::printf("schur 19x19 symmetric: %.3f ms (residual %.3g, %d iterations)\n", t_schur,
              sf.residual, sf.iterations);

  SimConfig cfg;
  cfg.seed = 1;
  const auto t0 = clock_type::now();
  Recording clean = gen_clean_eeg(cfg);
  Recording art = gen_emg_artifact(cfg, clean.channels(), clean.samples());
  GroundTruth gt = mix(clean, art, cfg.contamination_ratio);
  std::printf("semisim 19ch x 10s: %.1f ms\n", ms_since(t0));

  const auto t1 = clock_type::now();
  RemoveResult res = remove_artifacts(gt.contaminated, "iva");
  std::printf("remove --method iva: %.1f ms (separate %.1f ms, extract %.1f ms)\n",
              ms_since(t1), res.report.t_separate_ms, res.report.t_extract_ms);

  const auto t2 = clock_type::now();
  Recording filt = apply_zero_phase(design_bandpass(BandpassSpec{1.0, 70.0, 4, 250.0}),
                                    gt.contaminated);
  std::printf("zero-phase band-pass 19ch x 2500: %.2f ms (channel 0 head %.4f)\n",
              ms_since(t2), filt.data(0, 0));
  return 0;
}
