#pragma once

// Minimal static line/point plots. Output depends only on the data, so
// identical inputs give byte-identical files.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sqz/csv.hpp"

namespace sqz::svg {

struct Series {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
  bool markers = false;  // squares instead of a polyline
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

namespace detail {

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string num(double v) { return format_fixed(v, 2); }

}  // namespace detail

inline std::string render(const Plot& plot) {
  constexpr double width = 640, height = 420;
  constexpr double left = 70, right = 150, top = 40, bottom = 55;
  const double pw = width - left - right, ph = height - top - bottom;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.xs.size() && i < s.ys.size(); ++i) {
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      x0 = std::min(x0, s.xs[i]);
      x1 = std::max(x1, s.xs[i]);
      y0 = std::min(y0, s.ys[i]);
      y1 = std::max(y1, s.ys[i]);
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 <= 0) x1 = x0 + 1;
  if (y1 - y0 <= 0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << detail::num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\">"
      << detail::escape(plot.title) << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
    out << "<text x=\"" << detail::num(sx(fx)) << "\" y=\"" << detail::num(top + ph + 16)
        << "\" text-anchor=\"middle\">" << format_fixed(fx, 3) << "</text>\n";
    out << "<text x=\"" << detail::num(left - 6) << "\" y=\"" << detail::num(sy(fy) + 4)
        << "\" text-anchor=\"end\">" << format_fixed(fy, 2) << "</text>\n";
  }
  out << "<text x=\"" << detail::num(left + pw / 2) << "\" y=\"" << detail::num(height - 12)
      << "\" text-anchor=\"middle\">" << detail::escape(plot.x_label) << "</text>\n";
  out << "<text transform=\"translate(16," << detail::num(top + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << detail::escape(plot.y_label)
      << "</text>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = colors[k % 5];
    if (s.markers) {
      for (std::size_t i = 0; i < s.xs.size() && i < s.ys.size(); ++i) {
        if (!std::isfinite(s.ys[i])) continue;
        out << "<rect x=\"" << detail::num(sx(s.xs[i]) - 3) << "\" y=\""
            << detail::num(sy(s.ys[i]) - 3) << "\" width=\"6\" height=\"6\" fill=\"none\" stroke=\""
            << color << "\"/>\n";
      }
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
      for (std::size_t i = 0; i < s.xs.size() && i < s.ys.size(); ++i) {
        if (!std::isfinite(s.ys[i])) continue;
        out << (i ? " " : "") << detail::num(sx(s.xs[i])) << ',' << detail::num(sy(s.ys[i]));
      }
      out << "\"/>\n";
    }
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    out << "<rect x=\"" << detail::num(left + pw + 12) << "\" y=\"" << detail::num(ly - 8)
        << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << detail::num(left + pw + 28) << "\" y=\"" << detail::num(ly + 1)
        << "\">" << detail::escape(s.name) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace sqz::svg
