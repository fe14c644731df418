#pragma once
#include <vector>

#include "eegbss/matrix.hpp"

namespace eegbss {

// Real Schur form A = Q T Q^T. T is upper quasi-triangular: 1x1 blocks and
// 2x2 blocks (complex eigenvalue pairs) on the diagonal, exact zeros below
// the first subdiagonal.
struct SchurForm {
  Mat q;
  Mat t;
  int iterations = 0;
  double residual = 0.0;  // ||A - Q T Q^T||_F of the returned form
  bool converged = true;
};

// Householder Hessenberg reduction followed by Francis QR iteration with the
// Wilkinson shift pair (eigenvalues of the trailing 2x2) and deflation.
// max_iter <= 0 selects the default 100*C.
SchurForm schur_decompose(const Mat& a, int max_iter = 0, double tol = 1e-10);

struct SymEig {
  std::vector<double> values;  // descending
  Mat vectors;                 // columns, orthogonal; largest |entry| positive
};

// Schur path restricted to symmetric input (relative asymmetry > 1e-8 rejected).
SymEig sym_eig(const Mat& a);

// Sample covariance, centers internally, 1/(N-1) normalization.
Mat covariance(const Mat& data);

// Symmetrized lagged covariance 0.5*(R_tau + R_tau^T),
// R_tau = (1/(N-tau)) * sum_t (x_t - mean)(x_{t+tau} - mean)^T.
Mat lagged_covariance(const Mat& data, int lag);

struct WhitenModel {
  Mat v;       // whitening matrix, z = v * (x - mean)
  Mat v_inv;
  std::vector<double> mean;
};

// v = Lambda^{-1/2} U^T from sym_eig of the covariance. Throws if the
// smallest eigenvalue is below eig_floor * largest (degenerate channels).
WhitenModel whiten_fit(const Mat& data, double eig_floor = 1e-10);
Mat whiten_apply(const WhitenModel& wm, const Mat& data);
Mat unwhiten(const WhitenModel& wm, const Mat& sources);

struct JointDiag {
  Mat v;  // orthogonal, columns sign-fixed
  std::vector<double> off_history;  // off-criterion after each sweep
  int sweeps = 0;
  bool converged = true;
};

// Jacobi joint approximate diagonalization (Cardoso-Souloumiac angles) of M
// symmetric matrices; the M = 1 case routes through the Schur path.
JointDiag joint_diagonalize(const std::vector<Mat>& mats, double tol = 1e-10,
                            int max_sweeps = 100);

// Sum of squared off-diagonal entries over a set of matrices.
double off_criterion(const std::vector<Mat>& mats);

class Rng;

// Orthonormal basis of a seeded Gaussian matrix (modified Gram-Schmidt,
// two passes).
Mat random_orthogonal(Rng& rng, int n);

}  // namespace eegbss
