#pragma once
#include <string>
#include <vector>

#include "eegbss/matrix.hpp"

namespace eegbss {

// Multichannel signal: data is C x N, one row per channel, in microvolts.
struct Recording {
  std::vector<std::string> labels;
  double fs_hz = 0.0;
  Mat data;

  int channels() const { return data.rows; }
  int samples() const { return data.cols; }
};

// 10-20 montage, fixed order.
const std::vector<std::string>& montage_1020();

// Default labels: the 10-20 montage when c == 19, otherwise CH01, CH02, ...
std::vector<std::string> default_labels(int c);

// Throws with a distinct diagnostic for each violated invariant.
void validate(const Recording& rec);

struct SegmentPlan {
  int n_segments = 1;
  int segment_len = 0;
};

// CSV (one row per channel) + JSON sidecar {labels, fs_hz}. Pass either the
// bare name or the .csv path; the sidecar path is derived from it.
void save_recording(const Recording& rec, const std::string& path);
Recording load_recording(const std::string& path);

// Consecutive non-overlapping segments starting at sample 0; the trailing
// remainder is discarded.
std::vector<Recording> segment(const Recording& rec, const SegmentPlan& plan);

Recording center(const Recording& rec);

}  // namespace eegbss
