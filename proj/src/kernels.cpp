#include <cmath>
#include <stdexcept>

#include "eegbss/matrix.hpp"

namespace eegbss {

Mat identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; i++) m(i, i) = 1.0;
  return m;
}

Mat transpose(const Mat& m) {
  Mat t(m.cols, m.rows);
  for (int i = 0; i < m.rows; i++)
    for (int j = 0; j < m.cols; j++) t(j, i) = m(i, j);
  return t;
}

static void check_mul(const Mat& x, const Mat& y) {
  if (x.cols != y.rows) throw std::invalid_argument("matmul shape mismatch");
}

Mat matmul_serial(const Mat& x, const Mat& y) {
  check_mul(x, y);
  Mat z(x.rows, y.cols);
  for (int i = 0; i < x.rows; i++) {
    const double* xi = x.row(i);
    double* zi = z.row(i);
    for (int k = 0; k < x.cols; k++) {
      double v = xi[k];
      const double* yk = y.row(k);
      for (int j = 0; j < y.cols; j++) zi[j] += v * yk[j];
    }
  }
  return z;
}

// Parallel over output rows: each row is written by exactly one thread and
// the per-row summation order matches matmul_serial, so results are
// bit-identical to the reference kernel at any thread count.
Mat matmul(const Mat& x, const Mat& y) {
  check_mul(x, y);
  Mat z(x.rows, y.cols);
  const long long work = 1LL * x.rows * x.cols * y.cols;
  if (work < 64 * 1024) {
    for (int i = 0; i < x.rows; i++) {
      const double* xi = x.row(i);
      double* zi = z.row(i);
      for (int k = 0; k < x.cols; k++) {
        double v = xi[k];
        const double* yk = y.row(k);
        for (int j = 0; j < y.cols; j++) zi[j] += v * yk[j];
      }
    }
    return z;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < x.rows; i++) {
    const double* xi = x.row(i);
    double* zi = z.row(i);
    for (int k = 0; k < x.cols; k++) {
      double v = xi[k];
      const double* yk = y.row(k);
      for (int j = 0; j < y.cols; j++) zi[j] += v * yk[j];
    }
  }
  return z;
}

Mat add(const Mat& x, const Mat& y) {
  if (!x.same_shape(y)) throw std::invalid_argument("add shape mismatch");
  Mat z = x;
  for (size_t i = 0; i < z.a.size(); i++) z.a[i] += y.a[i];
  return z;
}

Mat sub(const Mat& x, const Mat& y) {
  if (!x.same_shape(y)) throw std::invalid_argument("sub shape mismatch");
  Mat z = x;
  for (size_t i = 0; i < z.a.size(); i++) z.a[i] -= y.a[i];
  return z;
}

Mat scale(const Mat& x, double s) {
  Mat z = x;
  for (double& v : z.a) v *= s;
  return z;
}

double fro_norm(const Mat& m) {
  double s = 0.0;
  for (double v : m.a) s += v * v;
  return std::sqrt(s);
}

double max_abs(const Mat& m) {
  double s = 0.0;
  for (double v : m.a) s = std::max(s, std::fabs(v));
  return s;
}

std::vector<double> matvec(const Mat& m, const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != m.cols)
    throw std::invalid_argument("matvec shape mismatch");
  std::vector<double> y(m.rows, 0.0);
  for (int i = 0; i < m.rows; i++) {
    const double* mi = m.row(i);
    double s = 0.0;
    for (int j = 0; j < m.cols; j++) s += mi[j] * v[j];
    y[i] = s;
  }
  return y;
}

}  // namespace eegbss
