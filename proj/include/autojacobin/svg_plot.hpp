#pragma once

// Deterministic SVG line charts for recall curves and cost traces.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "autojacobin/errors.hpp"
#include "autojacobin/report.hpp"

namespace ajb {

struct Series {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "i";
  std::string y_label = "value";
  int width = 720;
  int height = 440;
  bool log_x = false;
};

/// Reads the first two columns of a CSV as (x, y). Rows whose first cell is
/// not numeric (e.g. the trailing m_recall row) are skipped.
inline Series series_from_csv(const std::string& text, std::string name) {
  const CsvTable t = parse_csv(text);
  if (t.header.size() < 2) throw FormatError("plot: CSV needs at least two columns");
  Series s;
  s.name = std::move(name);
  for (const auto& row : t.rows) {
    double x = 0.0, y = 0.0;
    if (row.empty() || !parse_number(row[0], x)) continue;
    if (row.size() < 2 || !parse_number(row[1], y))
      throw FormatError("plot: malformed row starting with '" + row[0] + "'");
    s.xs.push_back(x);
    s.ys.push_back(y);
  }
  if (s.xs.empty()) throw FormatError("plot: no data rows in '" + s.name + "'");
  return s;
}

namespace detail {

inline std::string xml_escape(const std::string& s) {
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

inline std::string fixed2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace detail

inline std::string render_svg(const std::vector<Series>& series, const PlotOptions& opt) {
  if (series.empty()) throw FormatError("plot: no series");
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  auto tx = [&](double x) { return opt.log_x ? std::log10(std::max(x, 1e-300)) : x; };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    if (s.xs.size() != s.ys.size() || s.xs.empty()) throw FormatError("plot: malformed series");
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      const double x = tx(s.xs[i]);
      if (!std::isfinite(x) || !std::isfinite(s.ys[i])) throw FormatError("plot: non-finite value");
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, s.ys[i]);
      y1 = std::max(y1, s.ys[i]);
    }
  }
  if (x1 == x0) { x0 -= 0.5; x1 += 0.5; }
  if (y1 == y0) { y0 -= 0.5; y1 += 0.5; }

  const double left = 70, right = 180, top = 40, bottom = 60;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;
  auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
     << opt.height << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << opt.width << "\" height=\"" << opt.height
     << "\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    os << "<text x=\"" << detail::fixed2(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"15\">" << detail::xml_escape(opt.title)
       << "</text>\n";

  // Axes and ticks.
  os << "<path d=\"M" << detail::fixed2(left) << ' ' << detail::fixed2(top) << " V"
     << detail::fixed2(top + ph) << " H" << detail::fixed2(left + pw)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double fx = x0 + (x1 - x0) * t / 5.0;
    const double sx = left + pw * t / 5.0;
    const double label = opt.log_x ? std::pow(10.0, fx) : fx;
    os << "<text x=\"" << detail::fixed2(sx) << "\" y=\"" << detail::fixed2(top + ph + 18)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
       << detail::tick_label(label) << "</text>\n";
    const double fy = y0 + (y1 - y0) * t / 5.0;
    os << "<text x=\"" << detail::fixed2(left - 6) << "\" y=\"" << detail::fixed2(py(fy) + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << detail::tick_label(fy) << "</text>\n";
  }
  os << "<text x=\"" << detail::fixed2(left + pw / 2) << "\" y=\"" << detail::fixed2(opt.height - 14)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
     << detail::xml_escape(opt.x_label) << (opt.log_x ? " (log)" : "") << "</text>\n";
  os << "<text x=\"18\" y=\"" << detail::fixed2(top + ph / 2)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
     << detail::fixed2(top + ph / 2) << ")\">" << detail::xml_escape(opt.y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof kPalette / sizeof *kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].xs.size(); ++i)
      os << (i ? " " : "") << detail::fixed2(px(series[s].xs[i])) << ','
         << detail::fixed2(py(series[s].ys[i]));
    os << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(s);
    os << "<rect x=\"" << detail::fixed2(left + pw + 14) << "\" y=\"" << detail::fixed2(ly - 8)
       << "\" width=\"14\" height=\"4\" fill=\"" << color << "\"/>\n";
    os << "<text x=\"" << detail::fixed2(left + pw + 34) << "\" y=\"" << detail::fixed2(ly - 2)
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << detail::xml_escape(series[s].name)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace ajb
