#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "eegbss/linalg.hpp"
#include "eegbss/recording.hpp"

namespace eegbss {

// Demixing for K datasets. per_dataset_w[k] applies in the domain named by
// `domain` ("whitened": W_k acts on whiten_apply(whiten[k], data_k)).
struct DemixingModel {
  std::string method_tag;           // sobi | fastica | cca | iva
  std::string domain = "whitened";
  std::vector<WhitenModel> whiten;  // one per dataset
  std::vector<Mat> per_dataset_w;   // W_k, C x C
  std::vector<Mat> per_dataset_a;   // A_k = W_k^{-1}
  std::vector<double> canonical_corrs;  // cca only, descending
  std::vector<std::string> warnings;
  std::vector<std::string> labels;  // channel labels of the fitted data
  double fs_hz = 0.0;
  bool converged = true;
  int iterations = 0;

  int n_datasets() const { return (int)per_dataset_w.size(); }
};

struct SourceSet {
  std::vector<Mat> sources;           // S_k = W_k * whitened(data_k)
  std::vector<double> lag1_autocorr;  // per source index, averaged over datasets
  std::vector<double> band_ratio;     // power(30-70 Hz)/power(1-30 Hz), averaged
};

// Second-order separation: joint diagonalization of symmetrized lagged
// covariances of the whitened data. Rows ordered by descending lag-1
// autocorrelation.
DemixingModel sobi(const Recording& rec,
                   const std::vector<int>& lags = {1, 2, 3, 5, 8, 13, 21},
                   double tol = 1e-10, int max_sweeps = 100);

// Symmetric fixed-point FastICA on whitened data, tanh or cube contrast.
DemixingModel fastica(const Recording& rec, const std::string& nonlinearity = "tanh",
                      double tol = 1e-7, int max_iter = 200, std::uint64_t seed = 0);

// Canonical correlation analysis of two views sharing a sample axis.
// Returns the correlations (descending), the rotation of whitened view a
// onto the canonical directions, and the view-a whitener.
struct CanonicalBasis {
  std::vector<double> corrs;
  Mat u;
  WhitenModel wa;
};
CanonicalBasis canonical_correlations(const Mat& view_a, const Mat& view_b);

// Canonical correlation between X(t) and X(t-1); components ordered by
// descending canonical correlation.
DemixingModel cca_bss(const Recording& rec);

// Joint BSS over K >= 2 segments: per-segment SOBI initialization, greedy
// source-vector alignment, then gradient descent on
// J = sum_n E||y_n||_2 - sum_k log|det W_k| with backtracking line search.
DemixingModel iva(const std::vector<Recording>& segments,
                  const std::string& prior = "laplace", double step = 0.1,
                  double tol = 1e-4, int max_iter = 100, std::uint64_t seed = 0);

// Applies the model, rescales each source row to unit variance (adjusting
// the paired W row / A column), and fills diagnostics. Mutates the model.
SourceSet extract_sources(DemixingModel& model, const std::vector<Recording>& data);

// Permutation-invariant separation error of p = W * A_true; 0 iff p is a
// scaled permutation.
double amari_index(const Mat& p);

}  // namespace eegbss
