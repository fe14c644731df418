#include "eegbss/recording.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

namespace eegbss {

const std::vector<std::string>& montage_1020() {
  static const std::vector<std::string> m = {
      "FP1", "FP2", "F3", "F4", "C3", "C4", "P3", "P4", "O1", "O2",
      "F7",  "F8",  "T3", "T4", "T5", "T6", "Fz", "Cz", "Pz"};
  return m;
}

std::vector<std::string> default_labels(int c) {
  if (c == 19) return montage_1020();
  std::vector<std::string> out;
  out.reserve((size_t)c);
  char buf[16];
  for (int i = 0; i < c; ++i) {
    std::snprintf(buf, sizeof buf, "CH%02d", i + 1);
    out.emplace_back(buf);
  }
  return out;
}

void validate(const Recording& rec) {
  const int c = rec.channels();
  const int n = rec.samples();
  if (c < 1) throw std::invalid_argument("recording: no channels");
  if (n < 2) throw std::invalid_argument("recording: fewer than 2 samples");
  if ((int)rec.labels.size() != c)
    throw std::invalid_argument("recording: label count does not match channel count");
  std::set<std::string> seen;
  for (const auto& l : rec.labels) {
    if (l.empty()) throw std::invalid_argument("recording: empty channel label");
    if (!seen.insert(l).second)
      throw std::invalid_argument("recording: duplicate channel label");
  }
  if (!(rec.fs_hz > 0.0)) throw std::invalid_argument("recording: invalid sampling rate");
  for (double v : rec.data.a)
    if (!std::isfinite(v)) throw std::invalid_argument("recording: non-finite value");
}

namespace {

std::string strip_csv_suffix(const std::string& path) {
  if (path.size() > 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
    return path.substr(0, path.size() - 4);
  return path;
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

void save_recording(const Recording& rec, const std::string& path) {
  validate(rec);
  const std::string base = strip_csv_suffix(path);

  std::ofstream csv(base + ".csv");
  if (!csv) throw std::runtime_error("save_recording: cannot write " + base + ".csv");
  std::string line;
  for (int i = 0; i < rec.channels(); ++i) {
    line.clear();
    const double* row = rec.data.row(i);
    for (int t = 0; t < rec.samples(); ++t) {
      if (t) line.push_back(',');
      append_double(line, row[t]);
    }
    line.push_back('\n');
    csv << line;
  }
  if (!csv) throw std::runtime_error("save_recording: write failed for " + base + ".csv");
  csv.close();

  nlohmann::ordered_json meta;
  meta["labels"] = rec.labels;
  meta["fs_hz"] = rec.fs_hz;
  std::ofstream js(base + ".json");
  if (!js) throw std::runtime_error("save_recording: cannot write " + base + ".json");
  js << meta.dump(2) << '\n';
}

Recording load_recording(const std::string& path) {
  const std::string base = strip_csv_suffix(path);

  std::ifstream js(base + ".json");
  if (!js) throw std::runtime_error("load_recording: missing file " + base + ".json");
  nlohmann::json meta;
  try {
    js >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_recording: malformed sidecar: " + std::string(e.what()));
  }
  Recording rec;
  if (!meta.contains("labels") || !meta["labels"].is_array())
    throw std::runtime_error("load_recording: sidecar missing labels");
  for (const auto& l : meta["labels"]) rec.labels.push_back(l.get<std::string>());
  if (!meta.contains("fs_hz") || !meta["fs_hz"].is_number())
    throw std::runtime_error("load_recording: sidecar missing fs_hz");
  rec.fs_hz = meta["fs_hz"].get<double>();
  if (!(rec.fs_hz > 0.0)) throw std::runtime_error("load_recording: invalid sampling rate");

  std::ifstream csv(base + ".csv");
  if (!csv) throw std::runtime_error("load_recording: missing file " + base + ".csv");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(csv, line)) {
    if (line.empty() && csv.eof()) break;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p <= end) {
      double v = 0.0;
      auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc())
        throw std::runtime_error("load_recording: malformed number in row " +
                                 std::to_string(rows.size() + 1));
      row.push_back(v);
      p = res.ptr;
      if (p == end) break;
      if (*p != ',')
        throw std::runtime_error("load_recording: malformed row " +
                                 std::to_string(rows.size() + 1));
      ++p;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("load_recording: ragged row " +
                               std::to_string(rows.size() + 1));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("load_recording: empty data file");
  if (rows.size() != rec.labels.size())
    throw std::runtime_error("load_recording: row count does not match sidecar labels");

  rec.data = Mat((int)rows.size(), (int)rows.front().size());
  for (int i = 0; i < rec.channels(); ++i)
    std::copy(rows[(size_t)i].begin(), rows[(size_t)i].end(), rec.data.row(i));
  for (double v : rec.data.a)
    if (!std::isfinite(v)) throw std::runtime_error("load_recording: non-finite value");
  validate(rec);
  return rec;
}

std::vector<Recording> segment(const Recording& rec, const SegmentPlan& plan) {
  validate(rec);
  const int c = rec.channels();
  const int n = rec.samples();
  if (plan.n_segments < 1 || plan.segment_len < 2 * c ||
      (long long)plan.n_segments * plan.segment_len > (long long)n)
    throw std::invalid_argument("segment: infeasible plan");
  std::vector<Recording> out;
  out.reserve((size_t)plan.n_segments);
  for (int k = 0; k < plan.n_segments; ++k) {
    Recording seg;
    seg.labels = rec.labels;
    seg.fs_hz = rec.fs_hz;
    seg.data = Mat(c, plan.segment_len);
    const int off = k * plan.segment_len;
    for (int i = 0; i < c; ++i)
      std::copy(rec.data.row(i) + off, rec.data.row(i) + off + plan.segment_len,
                seg.data.row(i));
    out.push_back(std::move(seg));
  }
  return out;
}

Recording center(const Recording& rec) {
  validate(rec);
  Recording out = rec;
  const int n = rec.samples();
  for (int i = 0; i < rec.channels(); ++i) {
    double m = 0.0;
    const double* src = rec.data.row(i);
    for (int t = 0; t < n; ++t) m += src[t];
    m /= n;
    double* dst = out.data.row(i);
    for (int t = 0; t < n; ++t) dst[t] = src[t] - m;
  }
  return out;
}

}  // namespace eegbss
