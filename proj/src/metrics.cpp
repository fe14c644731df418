#include "eegbss/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace eegbss {

double rmse(const Recording& clean, const Recording& rec) {
  if (!clean.data.same_shape(rec.data))
    throw std::invalid_argument("rmse: shape mismatch");
  double s = 0.0;
  for (size_t i = 0; i < clean.data.a.size(); ++i) {
    const double d = clean.data.a[i] - rec.data.a[i];
    s += d * d;
  }
  return std::sqrt(s / (double)clean.data.a.size());
}

double snr_db(const Recording& clean, const Recording& rec) {
  if (!clean.data.same_shape(rec.data))
    throw std::invalid_argument("snr_db: shape mismatch");
  double sig = 0.0, res = 0.0;
  for (size_t i = 0; i < clean.data.a.size(); ++i) {
    const double c = clean.data.a[i];
    const double d = c - rec.data.a[i];
    sig += c * c;
    res += d * d;
  }
  if (sig == 0.0) throw std::invalid_argument("snr_db: zero clean signal");
  if (res == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(sig / res);
}

namespace {

Recording crop(const Recording& rec, int n) {
  if (n == rec.samples()) return rec;
  Recording out;
  out.labels = rec.labels;
  out.fs_hz = rec.fs_hz;
  out.data = Mat(rec.channels(), n);
  for (int i = 0; i < rec.channels(); ++i)
    std::copy(rec.data.row(i), rec.data.row(i) + n, out.data.row(i));
  return out;
}

int thread_budget() {
  const char* env = std::getenv("EEGBSS_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n > 0 ? n : 1;
}

}  // namespace

std::vector<EvalRow> compare_methods(const std::vector<GroundTruth>& batch,
                                     const std::vector<std::string>& methods,
                                     const BandpassSpec& fcfg, const IdentifyConfig& icfg,
                                     int n_segments) {
  if (batch.empty()) throw std::invalid_argument("compare_methods: empty batch");
  if (methods.empty()) throw std::invalid_argument("compare_methods: no methods");

  const int nd = (int)batch.size();
  const int nm = (int)methods.size();
  std::vector<EvalRow> rows((size_t)(nd * nm));
  const int nt = thread_budget();

#pragma omp parallel for schedule(dynamic) num_threads(nt) if (nt > 1)
  for (int cell = 0; cell < nd * nm; ++cell) {
    const int d = cell / nm;
    const int m = cell % nm;
    EvalRow row;
    row.dataset_id = d + 1;
    row.method_tag = methods[(size_t)m];
    try {
      RemoveResult res =
          remove_artifacts(batch[(size_t)d].contaminated, methods[(size_t)m], fcfg, icfg,
                           (std::uint64_t)row.dataset_id, n_segments);
      const Recording ref = crop(batch[(size_t)d].clean, res.cleaned.samples());
      row.rmse = rmse(ref, res.cleaned);
      row.snr_db = snr_db(ref, res.cleaned);
      if (std::isinf(row.snr_db)) row.status = "perfect";
    } catch (const std::exception& e) {
      row.status = "failed";
      row.note = e.what();
      row.rmse = std::numeric_limits<double>::quiet_NaN();
      row.snr_db = std::numeric_limits<double>::quiet_NaN();
    }
    rows[(size_t)cell] = std::move(row);
  }

  std::sort(rows.begin(), rows.end(), [](const EvalRow& a, const EvalRow& b) {
    if (a.dataset_id != b.dataset_id) return a.dataset_id < b.dataset_id;
    return a.method_tag < b.method_tag;
  });
  return rows;
}

std::string render_table(const std::vector<EvalRow>& rows, const std::string& format) {
  if (rows.empty()) throw std::invalid_argument("render_table: no rows");
  const bool csv = format == "csv";
  if (!csv && format != "markdown")
    throw std::invalid_argument("render_table: format must be csv or markdown");

  auto num = [](double v, const std::string& status, bool is_snr) {
    if (status == "failed") return std::string("failed");
    if (is_snr && status == "perfect") return std::string("perfect");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };

  std::string out;
  if (csv) {
    out += "dataset,method,rmse,snr_db\n";
    for (const EvalRow& r : rows) {
      out += std::to_string(r.dataset_id) + "," + r.method_tag + "," +
             num(r.rmse, r.status, false) + "," + num(r.snr_db, r.status, true) + "\n";
    }
  } else {
    out += "| dataset | method | rmse | snr_db |\n";
    out += "| --- | --- | --- | --- |\n";
    for (const EvalRow& r : rows) {
      out += "| " + std::to_string(r.dataset_id) + " | " + r.method_tag + " | " +
             num(r.rmse, r.status, false) + " | " + num(r.snr_db, r.status, true) +
             " |\n";
    }
  }
  return out;
}

}  // namespace eegbss
