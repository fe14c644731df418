#include "eegbss/plot.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace eegbss {

namespace {

void fmt(std::string& out, const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  out += buf;
}

void polyline(std::string& out, const double* x, int n, double x0, double xw,
              double cy, double half, double amp, const char* style) {
  out += "  <polyline fill=\"none\" ";
  out += style;
  out += " points=\"";
  for (int t = 0; t < n; ++t) {
    const double px = x0 + xw * ((n == 1) ? 0.0 : (double)t / (n - 1));
    const double py = cy - (x[t] / amp) * half;
    if (t) out += ' ';
    fmt(out, "%.3f", px);
    out += ',';
    fmt(out, "%.3f", py);
  }
  out += "\"/>\n";
}

}  // namespace

void plot_svg(const Recording& rec, const Recording* overlay,
              const std::vector<std::string>& channels, const std::string& path) {
  validate(rec);
  if (overlay) {
    validate(*overlay);
    if (!rec.data.same_shape(overlay->data) || rec.labels != overlay->labels)
      throw std::invalid_argument("plot: overlay recording does not match");
  }

  std::vector<int> sel;
  std::vector<std::string> names = channels.empty() ? rec.labels : channels;
  for (const std::string& name : names) {
    int idx = -1;
    for (int i = 0; i < rec.channels(); ++i)
      if (rec.labels[(size_t)i] == name) { idx = i; break; }
    if (idx < 0) {
      std::string msg = "plot: unknown channel '" + name + "'; valid channels:";
      for (const std::string& l : rec.labels) msg += " " + l;
      throw std::invalid_argument(msg);
    }
    sel.push_back(idx);
  }

  const int n = rec.samples();
  const double ml = 70.0, mr = 20.0, mt = 20.0, mb = 40.0;
  const double row_h = 90.0, gap = 12.0, plot_w = 900.0;
  const double width = ml + plot_w + mr;
  const double height = mt + sel.size() * row_h + (sel.size() - 1) * gap + mb;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"";
  fmt(out, "%.0f", width);
  out += "\" height=\"";
  fmt(out, "%.0f", height);
  out += "\" font-family=\"monospace\" font-size=\"12\">\n";
  out += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (size_t r = 0; r < sel.size(); ++r) {
    const int i = sel[r];
    const double top = mt + r * (row_h + gap);
    const double cy = top + 0.5 * row_h;
    double amp = 0.0;
    for (int t = 0; t < n; ++t) amp = std::max(amp, std::fabs(rec.data(i, t)));
    if (overlay)
      for (int t = 0; t < n; ++t) amp = std::max(amp, std::fabs(overlay->data(i, t)));
    amp = std::max(amp, 1e-12);

    out += "  <text x=\"8\" y=\"";
    fmt(out, "%.3f", cy + 4.0);
    out += "\">" + rec.labels[(size_t)i] + "</text>\n";
    out += "  <line stroke=\"#cccccc\" stroke-width=\"0.5\" x1=\"";
    fmt(out, "%.3f", ml);
    out += "\" y1=\"";
    fmt(out, "%.3f", cy);
    out += "\" x2=\"";
    fmt(out, "%.3f", ml + plot_w);
    out += "\" y2=\"";
    fmt(out, "%.3f", cy);
    out += "\"/>\n";

    polyline(out, rec.data.row(i), n, ml, plot_w, cy, 0.45 * row_h, amp,
             "stroke=\"#1f77b4\" stroke-width=\"1\"");
    if (overlay)
      polyline(out, overlay->data.row(i), n, ml, plot_w, cy, 0.45 * row_h, amp,
               "stroke=\"#d62728\" stroke-width=\"1\" stroke-dasharray=\"4 2\"");
  }

  const double axis_y = height - mb + 10.0;
  out += "  <line stroke=\"black\" stroke-width=\"1\" x1=\"";
  fmt(out, "%.3f", ml);
  out += "\" y1=\"";
  fmt(out, "%.3f", axis_y);
  out += "\" x2=\"";
  fmt(out, "%.3f", ml + plot_w);
  out += "\" y2=\"";
  fmt(out, "%.3f", axis_y);
  out += "\"/>\n";
  out += "  <text x=\"";
  fmt(out, "%.3f", ml);
  out += "\" y=\"";
  fmt(out, "%.3f", axis_y + 16.0);
  out += "\">0 s</text>\n";
  out += "  <text text-anchor=\"end\" x=\"";
  fmt(out, "%.3f", ml + plot_w);
  out += "\" y=\"";
  fmt(out, "%.3f", axis_y + 16.0);
  out += "\">";
  fmt(out, "%.3f", (n - 1) / rec.fs_hz);
  out += " s</text>\n";
  out += "</svg>\n";

  std::ofstream f(path);
  if (!f) throw std::runtime_error("plot: cannot write " + path);
  f << out;
}

}  // namespace eegbss
