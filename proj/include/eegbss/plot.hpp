#pragma once
#include <string>
#include <vector>

#include "eegbss/recording.hpp"

namespace eegbss {

// Stacked-channel SVG: one polyline per selected channel (two when an
// overlay recording is given), time axis in seconds. Deterministic text
// output; byte-identical for identical inputs. channels empty = all.
void plot_svg(const Recording& rec, const Recording* overlay,
              const std::vector<std::string>& channels, const std::string& path);

}  // namespace eegbss
