#pragma once
#include <string>
#include <vector>

#include "eegbss/pipeline.hpp"
#include "eegbss/semisim.hpp"

namespace eegbss {

struct EvalRow {
  int dataset_id = 0;
  std::string method_tag;
  double rmse = 0.0;
  double snr_db = 0.0;
  std::string status = "ok";  // ok | perfect | failed
  std::string note;           // error text for failed cells
};

// sqrt of the mean squared entry-wise difference
double rmse(const Recording& clean, const Recording& rec);

// 10*log10(sum clean^2 / sum (clean-rec)^2); +inf when the residual is zero
double snr_db(const Recording& clean, const Recording& rec);

// One row per (dataset, method); pipeline seed = dataset_id; metrics are
// computed over the pipeline's output support (iva's dropped remainder is
// excluded from both operands). Failed cells become flagged rows. Honors
// EEGBSS_THREADS (default 1) for cell-level parallelism.
std::vector<EvalRow> compare_methods(const std::vector<GroundTruth>& batch,
                                     const std::vector<std::string>& methods,
                                     const BandpassSpec& fcfg = BandpassSpec{},
                                     const IdentifyConfig& icfg = IdentifyConfig{},
                                     int n_segments = 4);

// format: csv (header dataset,method,rmse,snr_db) or markdown; %.4f numbers
std::string render_table(const std::vector<EvalRow>& rows, const std::string& format);

}  // namespace eegbss
