#pragma once
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace eegbss {

// Dense row-major matrix of doubles. Small and dumb on purpose: every
// consumer in this library is a C x N or C x C problem with C <= 32.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  Mat(std::initializer_list<std::initializer_list<double>> init) {
    rows = static_cast<int>(init.size());
    cols = rows ? static_cast<int>(init.begin()->size()) : 0;
    a.reserve(static_cast<size_t>(rows) * cols);
    for (const auto& row : init) {
      if (static_cast<int>(row.size()) != cols)
        throw std::invalid_argument("ragged initializer");
      for (double v : row) a.push_back(v);
    }
  }

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
  double* row(int i) { return a.data() + static_cast<size_t>(i) * cols; }
  const double* row(int i) const { return a.data() + static_cast<size_t>(i) * cols; }
  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

Mat identity(int n);
Mat transpose(const Mat& m);
Mat matmul(const Mat& x, const Mat& y);         // OpenMP over output rows
Mat matmul_serial(const Mat& x, const Mat& y);  // reference kernel
Mat add(const Mat& x, const Mat& y);
Mat sub(const Mat& x, const Mat& y);
Mat scale(const Mat& x, double s);
double fro_norm(const Mat& m);
double max_abs(const Mat& m);

// y = m * v for a length-cols vector.
std::vector<double> matvec(const Mat& m, const std::vector<double>& v);

}  // namespace eegbss
