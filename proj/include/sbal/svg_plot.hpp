#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

// Minimal standalone SVG writers for line plots, faction heatmaps and bar charts.
namespace sbal::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;  // empty: take from the palette
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool legend = true;
};

struct FactionHeatmap {
  std::string title;
  std::vector<std::string> row_labels;     // agents
  std::vector<std::string> column_labels;  // years
  std::vector<std::vector<int>> cells;     // [row][column], +1 / -1, 0 for missing
};

struct BarChart {
  std::string title;
  std::string y_label;
  std::vector<std::string> labels;
  std::vector<double> values;
};

namespace detail {

inline constexpr double kWidth = 800.0;
inline constexpr double kHeight = 500.0;
inline constexpr double kLeft = 80.0;
inline constexpr double kRight = 160.0;
inline constexpr double kTop = 50.0;
inline constexpr double kBottom = 60.0;

inline const char* palette(std::size_t k) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return colors[k % 10];
}

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline std::string tick_text(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  const double step = (frac < 1.5 ? 1.0 : frac < 3.0 ? 2.0 : frac < 7.0 ? 5.0 : 10.0) * mag;
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return ticks;
}

inline void header(std::ostream& out, const std::string& title) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
      << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << num(kWidth / 2) << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << escape(title) << "</text>\n";
}

}  // namespace detail

inline void write_line_plot_svg(std::ostream& out, const LinePlot& plot) {
  using namespace detail;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : plot.series) {
    for (double v : s.x) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
    for (double v : s.y)
      if (std::isfinite(v)) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
  }
  if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0;
  if (!std::isfinite(ymin)) ymin = 0.0, ymax = 1.0;
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymin -= 0.5, ymax += 0.5;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

  header(out, plot.title);
  out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : nice_ticks(xmin, xmax))
    out << "<text x=\"" << num(px(t)) << "\" y=\"" << num(kTop + ph + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick_text(t) << "</text>\n";
  for (double t : nice_ticks(ymin, ymax))
    out << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(t) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick_text(t) << "</text>\n";
  out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 15)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(plot.x_label) << "</text>\n";
  out << "<text transform=\"translate(20," << num(kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(plot.y_label)
      << "</text>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const std::string color = s.color.empty() ? palette(k) : s.color;
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      out << (i ? " " : "") << num(px(s.x[i])) << ',' << num(py(s.y[i]));
    }
    out << "\"/>\n";
    if (plot.legend) {
      const double ly = kTop + 14.0 * static_cast<double>(k);
      out << "<line x1=\"" << num(kLeft + pw + 10) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(kLeft + pw + 30)
          << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
          << "<text x=\"" << num(kLeft + pw + 34) << "\" y=\"" << num(ly + 4)
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
    }
  }
  out << "</svg>\n";
}

// Blue for the +1 faction, red for -1, grey where the year is missing.
inline void write_faction_heatmap_svg(std::ostream& out, const FactionHeatmap& map) {
  using namespace detail;
  const double pw = kWidth - kLeft - 40.0;
  const double ph = kHeight - kTop - kBottom;
  const double cw = map.column_labels.empty() ? pw : pw / static_cast<double>(map.column_labels.size());
  const double ch = map.row_labels.empty() ? ph : ph / static_cast<double>(map.row_labels.size());

  header(out, map.title);
  for (std::size_t r = 0; r < map.row_labels.size(); ++r) {
    out << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(kTop + ch * (r + 0.5) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << escape(map.row_labels[r])
        << "</text>\n";
    for (std::size_t c = 0; c < map.column_labels.size(); ++c) {
      const int v = r < map.cells.size() && c < map.cells[r].size() ? map.cells[r][c] : 0;
      const char* fill = v > 0 ? "#1f77b4" : v < 0 ? "#d62728" : "#cccccc";
      out << "<rect x=\"" << num(kLeft + cw * c) << "\" y=\"" << num(kTop + ch * r) << "\" width=\"" << num(cw)
          << "\" height=\"" << num(ch) << "\" fill=\"" << fill << "\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
    }
  }
  const std::size_t stride = std::max<std::size_t>(1, map.column_labels.size() / 15);
  for (std::size_t c = 0; c < map.column_labels.size(); c += stride)
    out << "<text x=\"" << num(kLeft + cw * (c + 0.5)) << "\" y=\"" << num(kTop + ph + 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << escape(map.column_labels[c])
        << "</text>\n";
  out << "</svg>\n";
}

inline void write_bar_chart_svg(std::ostream& out, const BarChart& chart) {
  using namespace detail;
  const double pw = kWidth - kLeft - 40.0;
  const double ph = kHeight - kTop - kBottom;
  double vmax = 0.0;
  for (double v : chart.values)
    if (std::isfinite(v)) vmax = std::max(vmax, v);
  if (vmax == 0.0) vmax = 1.0;
  const double bw = chart.values.empty() ? pw : pw / static_cast<double>(chart.values.size());

  header(out, chart.title);
  out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
      << num(kTop + ph) << "\" stroke=\"black\"/>\n";
  for (double t : nice_ticks(0.0, vmax))
    out << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(kTop + ph - t / vmax * ph + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick_text(t) << "</text>\n";
  out << "<text transform=\"translate(20," << num(kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(chart.y_label)
      << "</text>\n";
  for (std::size_t k = 0; k < chart.values.size(); ++k) {
    const double h = std::isfinite(chart.values[k]) ? chart.values[k] / vmax * ph : 0.0;
    out << "<rect x=\"" << num(kLeft + bw * k + 0.1 * bw) << "\" y=\"" << num(kTop + ph - h) << "\" width=\""
        << num(0.8 * bw) << "\" height=\"" << num(h) << "\" fill=\"" << palette(0) << "\"/>\n";
    if (k < chart.labels.size())
      out << "<text x=\"" << num(kLeft + bw * (k + 0.5)) << "\" y=\"" << num(kTop + ph + 16)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << escape(chart.labels[k])
          << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace sbal::plot
