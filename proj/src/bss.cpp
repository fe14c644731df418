#include "eegbss/bss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eegbss/filter.hpp"
#include "eegbss/rng.hpp"

namespace eegbss {

namespace {

constexpr std::uint64_t kIcaStream = 0x1CAull;
constexpr double kGaussLogCosh = 0.3745672966;  // E[log cosh X], X ~ N(0,1)

double mean_of(const double* x, int n) {
  double m = 0.0;
  for (int t = 0; t < n; ++t) m += x[t];
  return m / n;
}

// sample lag-1 autocorrelation, clamped to [-1, 1]
double lag1_autocorr(const double* x, int n) {
  const double m = mean_of(x, n);
  double num = 0.0, den = 0.0;
  for (int t = 0; t < n; ++t) {
    const double d = x[t] - m;
    den += d * d;
    if (t + 1 < n) num += d * (x[t + 1] - m);
  }
  if (den < 1e-300) return 0.0;
  return std::clamp(num / den, -1.0, 1.0);
}

double pearson(const double* x, const double* y, int n) {
  const double mx = mean_of(x, n), my = mean_of(y, n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int t = 0; t < n; ++t) {
    const double dx = x[t] - mx, dy = y[t] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  const double den = std::sqrt(sxx * syy);
  return (den < 1e-300) ? 0.0 : sxy / den;
}

// (m m^T)^{-1/2} m via sym_eig: symmetric decorrelation step
Mat orthonormalize(const Mat& m) {
  Mat g = matmul(m, transpose(m));
  SymEig e = sym_eig(g);
  const int c = m.rows;
  if (e.values[(size_t)c - 1] < 1e-14 * e.values[0])
    throw std::runtime_error("orthonormalize: rank-deficient iterate");
  Mat s(c, c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j) {
      double acc = 0.0;
      for (int k = 0; k < c; ++k)
        acc += e.vectors(i, k) * e.vectors(j, k) / std::sqrt(e.values[(size_t)k]);
      s(i, j) = acc;
    }
  return matmul(s, m);
}

// 0.5 * log det(w w^T); ~0 for the orthogonal iterates kept here
double log_abs_det(const Mat& w) {
  Mat g = matmul(w, transpose(w));
  SymEig e = sym_eig(g);
  double s = 0.0;
  for (double v : e.values) {
    if (v <= 0.0) throw std::runtime_error("log_abs_det: singular matrix");
    s += std::log(v);
  }
  return 0.5 * s;
}

std::vector<double> scv_autocorrs(const std::vector<Mat>& sources) {
  const int c = sources[0].rows;
  std::vector<double> ac((size_t)c, 0.0);
  for (const Mat& s : sources)
    for (int i = 0; i < c; ++i) ac[(size_t)i] += lag1_autocorr(s.row(i), s.cols);
  for (double& v : ac) v /= (double)sources.size();
  return ac;
}

// common row permutation of every W_k (and A_k columns) by descending key
void order_rows(DemixingModel& model, const std::vector<double>& key) {
  const int c = model.per_dataset_w[0].rows;
  std::vector<int> idx((size_t)c);
  for (int i = 0; i < c; ++i) idx[(size_t)i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return key[(size_t)a] > key[(size_t)b]; });
  for (size_t k = 0; k < model.per_dataset_w.size(); ++k) {
    const Mat w = model.per_dataset_w[k];
    const Mat a = model.per_dataset_a[k];
    Mat wn(c, c), an(c, c);
    for (int i = 0; i < c; ++i)
      for (int j = 0; j < c; ++j) {
        wn(i, j) = w(idx[(size_t)i], j);
        an(j, i) = a(j, idx[(size_t)i]);
      }
    model.per_dataset_w[k] = wn;
    model.per_dataset_a[k] = an;
  }
}

// largest-|entry| element of each mixing column made positive
void fix_signs(DemixingModel& model) {
  const int c = model.per_dataset_w[0].rows;
  for (size_t k = 0; k < model.per_dataset_w.size(); ++k) {
    Mat& w = model.per_dataset_w[k];
    Mat& a = model.per_dataset_a[k];
    for (int j = 0; j < c; ++j) {
      int arg = 0;
      double best = -1.0;
      for (int i = 0; i < c; ++i) {
        const double m = std::fabs(a(i, j));
        if (m > best) { best = m; arg = i; }
      }
      if (a(arg, j) < 0.0) {
        for (int i = 0; i < c; ++i) a(i, j) = -a(i, j);
        for (int i = 0; i < c; ++i) w(j, i) = -w(j, i);
      }
    }
  }
}

// SOBI on already-whitened data: W rows ordered by descending lag-1
// autocorrelation of the extracted sources.
Mat sobi_core(const Mat& z, const std::vector<int>& lags, double tol, int max_sweeps,
              std::vector<std::string>& warnings, bool& converged) {
  if (lags.empty()) throw std::invalid_argument("sobi: empty lag list");
  for (int tau : lags)
    if (tau < 1 || tau >= z.cols / 4)
      throw std::invalid_argument("sobi: lags must lie in [1, N/4)");

  std::vector<Mat> rs;
  rs.reserve(lags.size());
  double max_rel = 0.0;
  const double base = std::sqrt((double)z.rows);  // ||I||_F of whitened R_0
  for (int tau : lags) {
    Mat r = lagged_covariance(z, tau);
    max_rel = std::max(max_rel, fro_norm(r) / base);
    rs.push_back(std::move(r));
  }
  if (max_rel < 0.05)
    warnings.push_back("sobi: no temporal structure at the requested lags");

  JointDiag jd = joint_diagonalize(rs, tol, max_sweeps);
  if (!jd.converged) {
    warnings.push_back("sobi: joint diagonalization did not converge");
    converged = false;
  }
  Mat w = transpose(jd.v);

  Mat s = matmul(w, z);
  std::vector<double> ac((size_t)z.rows);
  for (int i = 0; i < z.rows; ++i) ac[(size_t)i] = lag1_autocorr(s.row(i), s.cols);
  std::vector<int> idx((size_t)z.rows);
  for (int i = 0; i < z.rows; ++i) idx[(size_t)i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return ac[(size_t)a] > ac[(size_t)b]; });
  Mat wo(z.rows, z.rows);
  for (int i = 0; i < z.rows; ++i)
    for (int j = 0; j < z.rows; ++j) wo(i, j) = w(idx[(size_t)i], j);
  return wo;
}

}  // namespace

DemixingModel sobi(const Recording& rec, const std::vector<int>& lags, double tol,
                   int max_sweeps) {
  validate(rec);
  DemixingModel model;
  model.method_tag = "sobi";
  model.labels = rec.labels;
  model.fs_hz = rec.fs_hz;
  model.whiten.push_back(whiten_fit(rec.data));
  Mat z = whiten_apply(model.whiten[0], rec.data);

  bool conv = true;
  Mat w = sobi_core(z, lags, tol, max_sweeps, model.warnings, conv);
  model.converged = conv;
  model.per_dataset_w.push_back(w);
  model.per_dataset_a.push_back(transpose(w));
  fix_signs(model);
  return model;
}

DemixingModel fastica(const Recording& rec, const std::string& nonlinearity, double tol,
                      int max_iter, std::uint64_t seed) {
  validate(rec);
  const bool use_tanh = nonlinearity == "tanh";
  if (!use_tanh && nonlinearity != "cube")
    throw std::invalid_argument("fastica: nonlinearity must be tanh or cube");
  if (max_iter < 1) throw std::invalid_argument("fastica: max_iter must be >= 1");

  DemixingModel model;
  model.method_tag = "fastica";
  model.labels = rec.labels;
  model.fs_hz = rec.fs_hz;
  model.whiten.push_back(whiten_fit(rec.data));
  Mat z = whiten_apply(model.whiten[0], rec.data);
  const int c = z.rows;
  const int n = z.cols;

  Rng rng(derive_seed(seed, kIcaStream));
  Mat w = random_orthogonal(rng, c);

  Mat best_w = w;
  double best_lim = 2.0;
  bool converged = false;
  int it = 0;
  for (; it < max_iter; ++it) {
    Mat s = matmul(w, z);
    Mat wn(c, c);
    for (int i = 0; i < c; ++i) {
      const double* si = s.row(i);
      double gp = 0.0;
      std::vector<double> g((size_t)n);
      if (use_tanh) {
        for (int t = 0; t < n; ++t) {
          const double th = std::tanh(si[t]);
          g[(size_t)t] = th;
          gp += 1.0 - th * th;
        }
      } else {
        for (int t = 0; t < n; ++t) {
          g[(size_t)t] = si[t] * si[t] * si[t];
          gp += 3.0 * si[t] * si[t];
        }
      }
      gp /= n;
      for (int j = 0; j < c; ++j) {
        double acc = 0.0;
        const double* zj = z.row(j);
        for (int t = 0; t < n; ++t) acc += g[(size_t)t] * zj[t];
        wn(i, j) = acc / n - gp * w(i, j);
      }
    }
    wn = orthonormalize(wn);

    double min_diag = 2.0;
    for (int i = 0; i < c; ++i) {
      double d = 0.0;
      for (int j = 0; j < c; ++j) d += wn(i, j) * w(i, j);
      min_diag = std::min(min_diag, std::fabs(d));
    }
    const double lim = 1.0 - min_diag;
    w = wn;
    if (lim < best_lim) {
      best_lim = lim;
      best_w = w;
    }
    if (lim < tol) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) {
    w = best_w;
    model.warnings.push_back("fastica: max_iter exceeded; returning best iterate");
  }
  model.converged = converged;
  model.iterations = it;

  // Gaussian sources leave the contrast flat; flag them rather than pretend
  Mat s = matmul(w, z);
  bool all_gaussian = true;
  for (int i = 0; i < c && all_gaussian; ++i) {
    double m = 0.0;
    const double* si = s.row(i);
    for (int t = 0; t < n; ++t) m += std::log(std::cosh(si[t]));
    m /= n;
    if (std::fabs(m - kGaussLogCosh) >= 0.02) all_gaussian = false;
  }
  if (all_gaussian)
    model.warnings.push_back("fastica: sources indistinguishable from Gaussian");

  std::vector<double> ac((size_t)c);
  for (int i = 0; i < c; ++i) ac[(size_t)i] = lag1_autocorr(s.row(i), n);
  model.per_dataset_w.push_back(w);
  model.per_dataset_a.push_back(transpose(w));
  order_rows(model, ac);
  fix_signs(model);
  return model;
}

CanonicalBasis canonical_correlations(const Mat& view_a, const Mat& view_b) {
  if (view_a.cols != view_b.cols)
    throw std::invalid_argument("canonical_correlations: sample counts differ");
  const int m = view_a.cols;
  if (m < 2)
    throw std::invalid_argument("canonical_correlations: at least 2 samples required");

  CanonicalBasis basis;
  basis.wa = whiten_fit(view_a);
  WhitenModel wb = whiten_fit(view_b);
  Mat za = whiten_apply(basis.wa, view_a);
  Mat zb = whiten_apply(wb, view_b);

  Mat q(view_a.rows, view_b.rows);
  for (int i = 0; i < q.rows; ++i)
    for (int j = 0; j < q.cols; ++j) {
      double acc = 0.0;
      const double* ra = za.row(i);
      const double* rb = zb.row(j);
      for (int t = 0; t < m; ++t) acc += ra[t] * rb[t];
      q(i, j) = acc / (m - 1);
    }

  SymEig e = sym_eig(matmul(q, transpose(q)));
  basis.u = e.vectors;
  const int k = std::min(view_a.rows, view_b.rows);
  basis.corrs.resize((size_t)k);
  for (int i = 0; i < k; ++i)
    basis.corrs[(size_t)i] = std::sqrt(std::clamp(e.values[(size_t)i], 0.0, 1.0));
  return basis;
}

DemixingModel cca_bss(const Recording& rec) {
  validate(rec);
  const int n = rec.samples();
  if (n < 3) throw std::invalid_argument("cca_bss: at least 3 samples required");
  const int c = rec.channels();

  DemixingModel model;
  model.method_tag = "cca";
  model.labels = rec.labels;
  model.fs_hz = rec.fs_hz;
  model.whiten.push_back(whiten_fit(rec.data));
  Mat z = whiten_apply(model.whiten[0], rec.data);

  const int m = n - 1;
  Mat y1(c, m), y0(c, m);  // X(t) and X(t-1)
  for (int i = 0; i < c; ++i)
    for (int t = 0; t < m; ++t) {
      y1(i, t) = z(i, t + 1);
      y0(i, t) = z(i, t);
    }
  CanonicalBasis basis = canonical_correlations(y1, y0);
  model.canonical_corrs = basis.corrs;

  // canonical directions of the X(t) view, mapped back to pipeline-whitened
  // coordinates: W = U^T * V_1
  Mat w = matmul(transpose(basis.u), basis.wa.v);
  Mat a = matmul(basis.wa.v_inv, basis.u);
  model.per_dataset_w.push_back(w);
  model.per_dataset_a.push_back(a);
  fix_signs(model);
  return model;
}

DemixingModel iva(const std::vector<Recording>& segments, const std::string& prior,
                  double step, double tol, int max_iter, std::uint64_t seed) {
  (void)seed;  // initialization is already deterministic (SOBI per segment)
  if (segments.size() < 2)
    throw std::invalid_argument("IVA requires multiple data sets");
  if (prior != "laplace") throw std::invalid_argument("iva: unknown prior");
  if (!(step > 0.0)) throw std::invalid_argument("iva: step must be positive");
  const int k = (int)segments.size();
  const int c = segments[0].channels();
  const int n = segments[0].samples();
  for (const Recording& r : segments) {
    validate(r);
    if (r.channels() != c || r.samples() != n)
      throw std::invalid_argument("iva: segment shape mismatch");
  }

  DemixingModel model;
  model.method_tag = "iva";
  model.labels = segments[0].labels;
  model.fs_hz = segments[0].fs_hz;
  std::vector<Mat> zs;
  zs.reserve((size_t)k);
  for (int s = 0; s < k; ++s) {
    model.whiten.push_back(whiten_fit(segments[(size_t)s].data));
    zs.push_back(whiten_apply(model.whiten[(size_t)s], segments[(size_t)s].data));
  }

  const std::vector<int> lags = {1, 2, 3, 5, 8, 13, 21};
  std::vector<Mat> ws;
  ws.reserve((size_t)k);
  bool conv = true;
  for (int s = 0; s < k; ++s)
    ws.push_back(sobi_core(zs[(size_t)s], lags, 1e-10, 100, model.warnings, conv));

  // greedy alignment of source indices across adjacent segments; weakly
  // correlated rows (|r| < 0.15) keep their autocorrelation rank instead
  std::vector<Mat> srcs((size_t)k);
  srcs[0] = matmul(ws[0], zs[0]);
  for (int s = 1; s < k; ++s) {
    Mat cur = matmul(ws[(size_t)s], zs[(size_t)s]);
    std::vector<bool> used((size_t)c, false);
    Mat wn(c, c);
    Mat sn(c, n);
    for (int i = 0; i < c; ++i) {
      int pick = -1;
      double best = -1.0, sign = 1.0;
      for (int j = 0; j < c; ++j) {
        if (used[(size_t)j]) continue;
        const double r = pearson(srcs[(size_t)s - 1].row(i), cur.row(j), n);
        if (std::fabs(r) > best) {
          best = std::fabs(r);
          pick = j;
          sign = (r < 0.0) ? -1.0 : 1.0;
        }
      }
      if (best < 0.15) {  // no credible match: first free index, no flip
        for (int j = 0; j < c; ++j)
          if (!used[(size_t)j]) { pick = j; break; }
        sign = 1.0;
      }
      used[(size_t)pick] = true;
      for (int j = 0; j < c; ++j) wn(i, j) = sign * ws[(size_t)s](pick, j);
      for (int t = 0; t < n; ++t) sn(i, t) = sign * cur(pick, t);
    }
    ws[(size_t)s] = wn;
    srcs[(size_t)s] = sn;
  }

  auto cost = [&](const std::vector<Mat>& wset, std::vector<Mat>& sset) {
    double j_val = 0.0;
    for (int s = 0; s < k; ++s) sset[(size_t)s] = matmul(wset[(size_t)s], zs[(size_t)s]);
    for (int t = 0; t < n; ++t) {
      double sum = 0.0;
      for (int i = 0; i < c; ++i) {
        double r2 = 0.0;
        for (int s = 0; s < k; ++s) {
          const double v = sset[(size_t)s](i, t);
          r2 += v * v;
        }
        sum += std::sqrt(r2);
      }
      j_val += sum;
    }
    j_val /= n;
    for (int s = 0; s < k; ++s) j_val -= log_abs_det(wset[(size_t)s]);
    return j_val;
  };

  std::vector<Mat> cur_src((size_t)k);
  double j_cur = cost(ws, cur_src);
  bool converged = false;
  int accepted = 0;
  for (int it = 0; it < max_iter; ++it) {
    // gradient: (1/N) sum_t u_k(t) z_k(t)^T - W_k^{-T}, with u the unit SCV
    std::vector<Mat> grad((size_t)k, Mat(c, c));
    for (int t = 0; t < n; ++t) {
      for (int i = 0; i < c; ++i) {
        double r2 = 0.0;
        for (int s = 0; s < k; ++s) {
          const double v = cur_src[(size_t)s](i, t);
          r2 += v * v;
        }
        const double nrm = std::max(std::sqrt(r2), 1e-12);
        for (int s = 0; s < k; ++s) {
          const double u = cur_src[(size_t)s](i, t) / nrm;
          Mat& g = grad[(size_t)s];
          const double* zt = zs[(size_t)s].a.data();
          for (int j = 0; j < c; ++j)
            g(i, j) += u * zt[(size_t)j * n + t];
        }
      }
    }
    for (int s = 0; s < k; ++s)
      for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j)
          grad[(size_t)s](i, j) = grad[(size_t)s](i, j) / n - ws[(size_t)s](i, j);

    double st = step;
    bool moved = false;
    std::vector<Mat> trial((size_t)k);
    std::vector<Mat> trial_src((size_t)k);
    for (int half = 0; half < 40; ++half) {
      for (int s = 0; s < k; ++s) {
        Mat m = ws[(size_t)s];
        for (size_t idx = 0; idx < m.a.size(); ++idx)
          m.a[idx] -= st * grad[(size_t)s].a[idx];
        trial[(size_t)s] = orthonormalize(m);
      }
      const double j_try = cost(trial, trial_src);
      if (j_try < j_cur) {
        const double dj = j_cur - j_try;
        ws = trial;
        cur_src = trial_src;
        j_cur = j_try;
        moved = true;
        ++accepted;
        if (dj < tol * std::fabs(j_cur)) converged = true;
        break;
      }
      st *= 0.5;
    }
    if (!moved) {  // no descent direction at any step size: stationary
      converged = true;
      break;
    }
    if (converged) break;
  }
  if (!converged) {
    model.warnings.push_back("iva: max_iter exceeded; returning best iterate");
  }
  model.converged = converged;
  model.iterations = accepted;

  model.per_dataset_w = ws;
  for (int s = 0; s < k; ++s) model.per_dataset_a.push_back(transpose(ws[(size_t)s]));
  order_rows(model, scv_autocorrs(cur_src));
  fix_signs(model);
  return model;
}

SourceSet extract_sources(DemixingModel& model, const std::vector<Recording>& data) {
  const int k = model.n_datasets();
  if (k == 0 || (int)data.size() != k)
    throw std::invalid_argument("extract_sources: dataset count mismatch");
  if (model.domain != "whitened" && model.domain != "raw")
    throw std::invalid_argument("extract_sources: unknown domain");
  const int c = model.per_dataset_w[0].rows;

  SourceSet out;
  out.sources.reserve((size_t)k);
  for (int s = 0; s < k; ++s) {
    validate(data[(size_t)s]);
    if (data[(size_t)s].channels() != c)
      throw std::invalid_argument("extract_sources: channel count mismatch");
    Mat z = (model.domain == "whitened")
                ? whiten_apply(model.whiten[(size_t)s], data[(size_t)s].data)
                : center(data[(size_t)s]).data;
    out.sources.push_back(matmul(model.per_dataset_w[(size_t)s], z));
  }

  // symmetric unit-variance rescaling of (W row, A column) pairs
  for (int s = 0; s < k; ++s) {
    Mat& src = out.sources[(size_t)s];
    Mat& w = model.per_dataset_w[(size_t)s];
    Mat& a = model.per_dataset_a[(size_t)s];
    const int n = src.cols;
    for (int i = 0; i < c; ++i) {
      double* row = src.row(i);
      const double m = mean_of(row, n);
      double var = 0.0;
      for (int t = 0; t < n; ++t) var += (row[t] - m) * (row[t] - m);
      var /= (n - 1);
      if (var < 1e-24) throw std::runtime_error("extract_sources: degenerate source");
      const double sd = std::sqrt(var);
      for (int t = 0; t < n; ++t) row[t] /= sd;
      for (int j = 0; j < c; ++j) {
        w(i, j) /= sd;
        a(j, i) *= sd;
      }
    }
  }

  out.lag1_autocorr = scv_autocorrs(out.sources);

  const double fs = data[0].fs_hz;
  const double hi_edge = std::min(70.0, 0.45 * fs);
  if (hi_edge <= 31.0)
    throw std::invalid_argument("extract_sources: sampling rate too low for band diagnostics");
  BandpassSpec lo_spec, hi_spec;
  lo_spec.low_cut_hz = 1.0;
  lo_spec.high_cut_hz = 30.0;
  lo_spec.order = 4;
  lo_spec.fs_hz = fs;
  hi_spec.low_cut_hz = 30.0;
  hi_spec.high_cut_hz = hi_edge;
  hi_spec.order = 4;
  hi_spec.fs_hz = fs;
  const BiquadCascade lo = design_bandpass(lo_spec);
  const BiquadCascade hi = design_bandpass(hi_spec);

  out.band_ratio.assign((size_t)c, 0.0);
  for (int s = 0; s < k; ++s) {
    const Mat& src = out.sources[(size_t)s];
    const int n = src.cols;
    for (int i = 0; i < c; ++i) {
      std::vector<double> x(src.row(i), src.row(i) + n);
      std::vector<double> xl = zero_phase_channel(lo, x);
      std::vector<double> xh = zero_phase_channel(hi, x);
      double pl = 0.0, ph = 0.0;
      for (int t = 0; t < n; ++t) {
        pl += xl[(size_t)t] * xl[(size_t)t];
        ph += xh[(size_t)t] * xh[(size_t)t];
      }
      out.band_ratio[(size_t)i] += ph / std::max(pl, 1e-30);
    }
  }
  for (double& v : out.band_ratio) v /= k;
  return out;
}

double amari_index(const Mat& p) {
  if (p.rows != p.cols || p.rows < 2)
    throw std::invalid_argument("amari_index: square matrix of size >= 2 required");
  const int c = p.rows;
  double total = 0.0;
  for (int i = 0; i < c; ++i) {
    double sum = 0.0, mx = 0.0;
    for (int j = 0; j < c; ++j) {
      const double v = std::fabs(p(i, j));
      sum += v;
      mx = std::max(mx, v);
    }
    if (mx == 0.0) throw std::invalid_argument("amari_index: zero row");
    total += sum / mx - 1.0;
  }
  for (int j = 0; j < c; ++j) {
    double sum = 0.0, mx = 0.0;
    for (int i = 0; i < c; ++i) {
      const double v = std::fabs(p(i, j));
      sum += v;
      mx = std::max(mx, v);
    }
    if (mx == 0.0) throw std::invalid_argument("amari_index: zero column");
    total += sum / mx - 1.0;
  }
  return total / (2.0 * c * (c - 1));
}

}  // namespace eegbss
