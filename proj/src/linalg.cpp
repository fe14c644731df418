#include "eegbss/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "eegbss/rng.hpp"

namespace eegbss {

namespace {

// Givens rotation G = [[cs, -sn], [sn, cs]] applied as a similarity
// transform on rows/cols (r1, r2), accumulated into q from the right.
void rot_left(Mat& h, int r1, int r2, double cs, double sn) {
  for (int j = 0; j < h.cols; j++) {
    double x = h(r1, j), y = h(r2, j);
    h(r1, j) = cs * x + sn * y;
    h(r2, j) = -sn * x + cs * y;
  }
}

void rot_right(Mat& h, int c1, int c2, double cs, double sn) {
  for (int i = 0; i < h.rows; i++) {
    double x = h(i, c1), y = h(i, c2);
    h(i, c1) = cs * x + sn * y;
    h(i, c2) = -sn * x + cs * y;
  }
}

// Householder P = I - beta v v^T acting on rows (left) or cols (right)
// rs..rs+len-1 of m, full orthogonal complement range.
void house_left(Mat& m, int rs, const double* v, int len, double beta) {
  for (int j = 0; j < m.cols; j++) {
    double s = 0.0;
    for (int i = 0; i < len; i++) s += v[i] * m(rs + i, j);
    s *= beta;
    for (int i = 0; i < len; i++) m(rs + i, j) -= s * v[i];
  }
}

void house_right(Mat& m, int cs, const double* v, int len, double beta) {
  for (int i = 0; i < m.rows; i++) {
    double s = 0.0;
    for (int j = 0; j < len; j++) s += v[j] * m(i, cs + j);
    s *= beta;
    for (int j = 0; j < len; j++) m(i, cs + j) -= s * v[j];
  }
}

// Householder reduction to upper Hessenberg, accumulating Q.
void hessenberg(Mat& h, Mat& q) {
  const int n = h.rows;
  std::vector<double> v(n);
  for (int k = 0; k + 2 < n; k++) {
    double norm2 = 0.0;
    for (int i = k + 1; i < n; i++) norm2 += h(i, k) * h(i, k);
    if (norm2 == 0.0) continue;
    double alpha = std::sqrt(norm2);
    if (h(k + 1, k) > 0) alpha = -alpha;
    int len = n - k - 1;
    v[0] = h(k + 1, k) - alpha;
    for (int i = 1; i < len; i++) v[i] = h(k + 1 + i, k);
    double vtv = v[0] * v[0] + (norm2 - h(k + 1, k) * h(k + 1, k));
    if (vtv == 0.0) continue;
    double beta = 2.0 / vtv;
    house_left(h, k + 1, v.data(), len, beta);
    house_right(h, k + 1, v.data(), len, beta);
    house_right(q, k + 1, v.data(), len, beta);
    h(k + 1, k) = alpha;
    for (int i = k + 2; i < n; i++) h(i, k) = 0.0;
  }
}

// Householder for a length-2 or length-3 bulge column; returns false when
// the column is already collapsed.
bool small_house(double* x, int len, double* v, double* beta) {
  double norm2 = 0.0;
  for (int i = 0; i < len; i++) norm2 += x[i] * x[i];
  if (norm2 == 0.0) return false;
  double alpha = std::sqrt(norm2);
  if (x[0] > 0) alpha = -alpha;
  v[0] = x[0] - alpha;
  for (int i = 1; i < len; i++) v[i] = x[i];
  double vtv = v[0] * v[0] + (norm2 - x[0] * x[0]);
  if (vtv == 0.0) return false;
  *beta = 2.0 / vtv;
  return true;
}

// One implicit double-shift QR step (Francis bulge chase) on the active
// window [lo, hi] with shift polynomial x^2 - s x + p2.
void francis_step(Mat& h, Mat& q, int lo, int hi, double s, double p2) {
  double x = h(lo, lo) * h(lo, lo) + h(lo, lo + 1) * h(lo + 1, lo) -
             s * h(lo, lo) + p2;
  double y = h(lo + 1, lo) * (h(lo, lo) + h(lo + 1, lo + 1) - s);
  double z = (lo + 2 <= hi) ? h(lo + 2, lo + 1) * h(lo + 1, lo) : 0.0;
  double col[3], v[3], beta;
  for (int k = lo; k <= hi - 2; k++) {
    int len = (k + 2 <= hi) ? 3 : 2;
    col[0] = x; col[1] = y; col[2] = z;
    if (small_house(col, len, v, &beta)) {
      house_left(h, k, v, len, beta);
      house_right(h, k, v, len, beta);
      house_right(q, k, v, len, beta);
    }
    x = h(k + 1, k);
    y = h(k + 2, k);
    z = (k + 3 <= hi) ? h(k + 3, k) : 0.0;
  }
  col[0] = x; col[1] = y;
  if (small_house(col, 2, v, &beta)) {
    house_left(h, hi - 1, v, 2, beta);
    house_right(h, hi - 1, v, 2, beta);
    house_right(q, hi - 1, v, 2, beta);
  }
  // the chase leaves only rounding noise below the subdiagonal; pin it to 0
  for (int i = lo + 2; i <= hi; i++)
    for (int j = lo; j <= i - 2; j++) h(i, j) = 0.0;
}

// Triangularize the 2x2 block at rows (p, p+1) when its eigenvalues are
// real; complex pairs are left as quasi-triangular blocks.
void settle_2x2(Mat& h, Mat& q, int p) {
  double a = h(p, p), b = h(p, p + 1), c = h(p + 1, p), d = h(p + 1, p + 1);
  if (c == 0.0) return;
  double sd = 0.5 * (a - d);
  double disc = sd * sd + b * c;
  if (disc < 0.0) return;  // complex pair: keep the block
  double root = std::sqrt(disc);
  double l1 = 0.5 * (a + d) + root;
  // Pick the eigenvector formula whose large component is a sum of terms
  // with one sign: l1 - d = sd + root when sd >= 0, l1 - a = root - sd
  // otherwise.  Choosing by |b| vs |c| instead lets the cancelling
  // difference set the rotation angle and leaves O(sqrt(eps)) residue.
  double vx, vy;
  if (sd >= 0.0) { vx = l1 - d; vy = c; }
  else { vx = b; vy = l1 - a; }
  double r = std::hypot(vx, vy);
  if (r == 0.0) { h(p + 1, p) = 0.0; return; }
  double cs = vx / r, sn = vy / r;
  rot_left(h, p, p + 1, cs, sn);
  rot_right(h, p, p + 1, cs, sn);
  rot_right(q, p, p + 1, cs, sn);
  h(p + 1, p) = 0.0;
}

}  // namespace

SchurForm schur_decompose(const Mat& a, int max_iter, double tol) {
  if (a.rows != a.cols || a.rows < 1)
    throw std::invalid_argument("schur_decompose: square matrix required");
  for (double v : a.a)
    if (!std::isfinite(v))
      throw std::invalid_argument("schur_decompose: non-finite input");
  const int n = a.rows;
  if (max_iter <= 0) max_iter = 100 * n;

  SchurForm f;
  f.t = a;
  f.q = identity(n);
  double anorm = fro_norm(a);
  if (n == 1 || anorm == 0.0) {
    f.residual = 0.0;
    return f;
  }
  hessenberg(f.t, f.q);
  Mat& h = f.t;

  int hi = n - 1;
  int stall = 0;
  while (hi > 0) {
    for (int i = 0; i < hi; i++) {
      double thr = tol * (std::fabs(h(i, i)) + std::fabs(h(i + 1, i + 1)));
      if (thr == 0.0) thr = tol * anorm;
      if (std::fabs(h(i + 1, i)) <= thr) h(i + 1, i) = 0.0;
    }
    if (h(hi, hi - 1) == 0.0) { hi--; stall = 0; continue; }
    if (hi == 1 || h(hi - 1, hi - 2) == 0.0) {
      settle_2x2(h, f.q, hi - 1);
      hi -= 2;
      stall = 0;
      continue;
    }
    if (f.iterations >= max_iter) { f.converged = false; break; }
    int lo = hi - 1;
    while (lo > 0 && h(lo, lo - 1) != 0.0) lo--;
    double aa = h(hi - 1, hi - 1), bb = h(hi - 1, hi);
    double cc = h(hi, hi - 1), dd = h(hi, hi);
    double s = aa + dd, p2 = aa * dd - bb * cc;
    stall++;
    if (stall % 11 == 10) {  // exceptional shift to break symmetric cycles
      double w = std::fabs(h(hi, hi - 1)) + std::fabs(h(hi - 1, hi - 2));
      s = dd + 1.5 * w;
      p2 = 0.25 * s * s;
    }
    francis_step(h, f.q, lo, hi, s, p2);
    f.iterations++;
  }

  Mat rec = matmul(matmul(f.q, f.t), transpose(f.q));
  f.residual = fro_norm(sub(a, rec));
  return f;
}

SymEig sym_eig(const Mat& a) {
  if (a.rows != a.cols)
    throw std::invalid_argument("sym_eig: square matrix required");
  const int n = a.rows;
  double anorm = fro_norm(a);
  double asym = 0.0;
  for (int i = 0; i < n; i++)
    for (int j = i + 1; j < n; j++) {
      double d = a(i, j) - a(j, i);
      asym += 2.0 * d * d;
    }
  if (std::sqrt(asym) > 1e-8 * std::max(anorm, 1e-300))
    throw std::invalid_argument("sym_eig: input is not symmetric");

  SchurForm f = schur_decompose(a);
  if (!f.converged)
    throw std::runtime_error("sym_eig: QR iteration did not converge");

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) {
    return f.t(i, i) > f.t(j, j);
  });

  SymEig e;
  e.values.resize(n);
  e.vectors = Mat(n, n);
  for (int j = 0; j < n; j++) {
    e.values[j] = f.t(idx[j], idx[j]);
    int src = idx[j];
    int arg = 0;
    double best = 0.0;
    for (int i = 0; i < n; i++) {
      double m = std::fabs(f.q(i, src));
      if (m > best) { best = m; arg = i; }
    }
    double sgn = (f.q(arg, src) < 0.0) ? -1.0 : 1.0;
    for (int i = 0; i < n; i++) e.vectors(i, j) = sgn * f.q(i, src);
  }
  return e;
}

Mat covariance(const Mat& data) {
  const int c = data.rows, n = data.cols;
  if (n < 2) throw std::invalid_argument("covariance: need N >= 2");
  std::vector<double> mean(c, 0.0);
  for (int i = 0; i < c; i++) {
    double s = 0.0;
    for (int t = 0; t < n; t++) s += data(i, t);
    mean[i] = s / n;
  }
  Mat cov(c, c);
  for (int i = 0; i < c; i++) {
    for (int j = i; j < c; j++) {
      double s = 0.0;
      const double *xi = data.row(i), *xj = data.row(j);
      for (int t = 0; t < n; t++) s += (xi[t] - mean[i]) * (xj[t] - mean[j]);
      cov(i, j) = cov(j, i) = s / (n - 1);
    }
  }
  return cov;
}

Mat lagged_covariance(const Mat& data, int lag) {
  const int c = data.rows, n = data.cols;
  if (lag < 1) throw std::invalid_argument("lagged_covariance: use covariance for lag 0");
  if (lag >= n - 1) throw std::invalid_argument("lagged_covariance: lag too large");
  std::vector<double> mean(c, 0.0);
  for (int i = 0; i < c; i++) {
    double s = 0.0;
    for (int t = 0; t < n; t++) s += data(i, t);
    mean[i] = s / n;
  }
  Mat r(c, c);
  for (int i = 0; i < c; i++) {
    for (int j = 0; j < c; j++) {
      double s = 0.0;
      const double *xi = data.row(i), *xj = data.row(j);
      for (int t = 0; t + lag < n; t++)
        s += (xi[t] - mean[i]) * (xj[t + lag] - mean[j]);
      r(i, j) = s / (n - lag);
    }
  }
  Mat sym(c, c);
  for (int i = 0; i < c; i++)
    for (int j = 0; j < c; j++) sym(i, j) = 0.5 * (r(i, j) + r(j, i));
  return sym;
}

WhitenModel whiten_fit(const Mat& data, double eig_floor) {
  Mat cov = covariance(data);
  SymEig e = sym_eig(cov);
  const int c = cov.rows;
  double lmax = e.values.empty() ? 0.0 : e.values[0];
  if (lmax <= 0.0 || e.values[c - 1] < eig_floor * lmax)
    throw std::runtime_error(
        "whiten_fit: covariance is rank-deficient (degenerate channels)");
  WhitenModel wm;
  wm.mean.resize(c);
  for (int i = 0; i < c; i++) {
    double s = 0.0;
    for (int t = 0; t < data.cols; t++) s += data(i, t);
    wm.mean[i] = s / data.cols;
  }
  wm.v = Mat(c, c);
  wm.v_inv = Mat(c, c);
  for (int i = 0; i < c; i++) {
    double inv_sqrt = 1.0 / std::sqrt(e.values[i]);
    double sqrt_l = std::sqrt(e.values[i]);
    for (int j = 0; j < c; j++) {
      wm.v(i, j) = inv_sqrt * e.vectors(j, i);
      wm.v_inv(j, i) = sqrt_l * e.vectors(j, i);
    }
  }
  return wm;
}

Mat whiten_apply(const WhitenModel& wm, const Mat& data) {
  Mat centered = data;
  for (int i = 0; i < data.rows; i++)
    for (int t = 0; t < data.cols; t++) centered(i, t) -= wm.mean[i];
  return matmul(wm.v, centered);
}

Mat unwhiten(const WhitenModel& wm, const Mat& sources) {
  Mat x = matmul(wm.v_inv, sources);
  for (int i = 0; i < x.rows; i++)
    for (int t = 0; t < x.cols; t++) x(i, t) += wm.mean[i];
  return x;
}

double off_criterion(const std::vector<Mat>& mats) {
  double s = 0.0;
  for (const Mat& m : mats)
    for (int i = 0; i < m.rows; i++)
      for (int j = 0; j < m.cols; j++)
        if (i != j) s += m(i, j) * m(i, j);
  return s;
}

JointDiag joint_diagonalize(const std::vector<Mat>& mats, double tol,
                            int max_sweeps) {
  if (mats.empty()) throw std::invalid_argument("joint_diagonalize: no matrices");
  const int c = mats[0].rows;
  for (const Mat& m : mats) {
    if (m.rows != c || m.cols != c)
      throw std::invalid_argument("joint_diagonalize: shape mismatch");
    double norm = fro_norm(m), asym = 0.0;
    for (int i = 0; i < c; i++)
      for (int j = i + 1; j < c; j++) {
        double d = m(i, j) - m(j, i);
        asym += 2.0 * d * d;
      }
    if (std::sqrt(asym) > 1e-8 * std::max(norm, 1e-300))
      throw std::invalid_argument("joint_diagonalize: asymmetric input");
  }

  JointDiag jd;
  if (mats.size() == 1) {  // single matrix: Schur path is exact
    SymEig e = sym_eig(mats[0]);
    jd.v = e.vectors;
    Mat d = matmul(matmul(transpose(jd.v), mats[0]), jd.v);
    jd.off_history.push_back(off_criterion({d}));
    return jd;
  }

  std::vector<Mat> work = mats;
  jd.v = identity(c);
  jd.converged = false;
  for (int sweep = 0; sweep < max_sweeps; sweep++) {
    double max_sin = 0.0;
    for (int p = 0; p < c - 1; p++) {
      for (int q = p + 1; q < c; q++) {
        // Cardoso-Souloumiac: maximize [cos2t sin2t] G [cos2t sin2t]^T,
        // G = sum_m h h^T with h = (a_pp - a_qq, 2 a_pq)
        double g11 = 0.0, g12 = 0.0, g22 = 0.0;
        for (const Mat& m : work) {
          double u = m(p, p) - m(q, q);
          double w = 2.0 * m(p, q);
          g11 += u * u;
          g12 += u * w;
          g22 += w * w;
        }
        double half = 0.5 * (g11 - g22);
        double r = std::hypot(half, g12);
        if (r == 0.0) continue;
        double lmax = 0.5 * (g11 + g22) + r;
        double vx, vy;  // eigenvector for lmax, larger-residual row form
        if (g11 >= g22) { vx = lmax - g22; vy = g12; }
        else { vx = g12; vy = lmax - g11; }
        double nrm = std::hypot(vx, vy);
        if (nrm == 0.0) continue;
        // cos2t >= 0 keeps the angle in [-pi/4, pi/4]
        double c2 = vx / nrm, s2 = vy / nrm;
        if (c2 < 0.0) { c2 = -c2; s2 = -s2; }
        double cs = std::sqrt(0.5 * (1.0 + c2));
        double sn = (cs > 0.0) ? 0.5 * s2 / cs : 0.0;
        if (std::fabs(sn) > max_sin) max_sin = std::fabs(sn);
        if (sn == 0.0) continue;
        for (Mat& m : work) {
          rot_left(m, p, q, cs, sn);
          rot_right(m, p, q, cs, sn);
        }
        rot_right(jd.v, p, q, cs, sn);
      }
    }
    jd.sweeps = sweep + 1;
    jd.off_history.push_back(off_criterion(work));
    if (max_sin < tol) { jd.converged = true; break; }
  }

  for (int j = 0; j < c; j++) {  // deterministic column signs
    int arg = 0;
    double best = 0.0;
    for (int i = 0; i < c; i++) {
      double m = std::fabs(jd.v(i, j));
      if (m > best) { best = m; arg = i; }
    }
    if (jd.v(arg, j) < 0.0)
      for (int i = 0; i < c; i++) jd.v(i, j) = -jd.v(i, j);
  }
  return jd;
}

Mat random_orthogonal(Rng& rng, int n) {
  if (n < 1) throw std::invalid_argument("random_orthogonal: empty");
  Mat q(n, n);
  for (size_t i = 0; i < q.a.size(); i++) q.a[i] = rng.gauss();
  for (int j = 0; j < n; j++) {
    for (int pass = 0; pass < 2; pass++) {
      for (int k = 0; k < j; k++) {
        double dot = 0.0;
        for (int i = 0; i < n; i++) dot += q(i, k) * q(i, j);
        for (int i = 0; i < n; i++) q(i, j) -= dot * q(i, k);
      }
    }
    double nrm = 0.0;
    for (int i = 0; i < n; i++) nrm += q(i, j) * q(i, j);
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12) throw std::runtime_error("random_orthogonal: degenerate basis");
    for (int i = 0; i < n; i++) q(i, j) /= nrm;
  }
  return q;
}

}  // namespace eegbss
