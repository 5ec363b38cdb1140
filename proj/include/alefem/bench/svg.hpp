#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "alefem/bench/csv.hpp"

namespace alefem::bench {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct PlotSpec {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  bool log_log = false;
  std::vector<std::string> annotations;  // printed below the legend
  int width = 720;
  int height = 480;
};

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

inline std::string fmt(double v, const char* f = "%.6g") {
  char buf[32];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                     "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace detail

/// Static SVG line plot, one polyline per series. Log-log plots drop
/// nonpositive points. An empty series list gives empty axes on [0,1]^2.
inline std::string render_svg(const std::vector<Series>& series, const PlotSpec& spec) {
  auto tx = [&](double v) { return spec.log_log ? std::log10(v) : v; };
  auto usable = [&](const std::pair<double, double>& p) {
    if (!std::isfinite(p.first) || !std::isfinite(p.second)) return false;
    return !spec.log_log || (p.first > 0.0 && p.second > 0.0);
  };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      if (!usable(p)) continue;
      x0 = std::min(x0, tx(p.first));
      x1 = std::max(x1, tx(p.first));
      y0 = std::min(y0, tx(p.second));
      y1 = std::max(y1, tx(p.second));
    }
  if (!(x0 <= x1)) x0 = 0.0, x1 = 1.0;
  if (!(y0 <= y1)) y0 = 0.0, y1 = 1.0;
  if (x1 - x0 < 1e-300) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-300) y0 -= 0.5, y1 += 0.5;

  const double left = 80, right = 200, top = 40, bottom = 60;
  const double pw = spec.width - left - right, ph = spec.height - top - bottom;
  auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + ph - (tx(v) - y0) / (y1 - y0) * ph; };
  auto tick_label = [&](double t) { return spec.log_log ? "1e" + detail::fmt(t, "%.3g") : detail::fmt(t, "%.4g"); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << detail::xml_escape(spec.title) << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
    const double sx = left + pw * k / 4.0, sy = top + ph - ph * k / 4.0;
    os << "<line x1=\"" << sx << "\" y1=\"" << top + ph << "\" x2=\"" << sx << "\" y2=\"" << top + ph + 5
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << sx << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << tick_label(fx)
       << "</text>\n";
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << sy << "\" x2=\"" << left << "\" y2=\"" << sy
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">" << tick_label(fy) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << spec.height - 15 << "\" text-anchor=\"middle\">"
     << detail::xml_escape(spec.x_label) << "</text>\n";
  os << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << top + ph / 2
     << ")\">" << detail::xml_escape(spec.y_label) << "</text>\n";

  double ly = top + 10;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = detail::kPalette[i % detail::kPalette.size()];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& p : series[i].points) {
      if (!usable(p)) continue;
      os << (first ? "" : " ") << detail::fmt(px(p.first)) << ',' << detail::fmt(py(p.second));
      first = false;
    }
    os << "\"/>\n";
    os << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 30 << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + pw + 35 << "\" y=\"" << ly + 4 << "\">" << detail::xml_escape(series[i].label)
       << "</text>\n";
    ly += 16;
  }
  ly += 8;
  for (const auto& a : spec.annotations) {
    os << "<text class=\"annotation\" x=\"" << left + pw + 10 << "\" y=\"" << ly << "\">" << detail::xml_escape(a)
       << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
  return os.str();
}

/// Group rows of `table` by the values of `group_columns` (in order of first
/// appearance) and collect (x, y) pairs. Throws std::runtime_error on a
/// non-numeric x or y field.
inline std::vector<Series> series_from_csv(const CsvTable& table, const std::string& x_column, const std::string& y_column,
                                           const std::vector<std::string>& group_columns) {
  const std::size_t xc = table.column(x_column), yc = table.column(y_column);
  std::vector<std::size_t> gc;
  for (const auto& g : group_columns) gc.push_back(table.column(g));
  auto number = [](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw std::runtime_error("csv: non-numeric field '" + s + "'");
    return v;
  };
  std::vector<Series> out;
  std::map<std::string, std::size_t> index;
  for (const auto& row : table.rows()) {
    std::string key;
    for (std::size_t k = 0; k < gc.size(); ++k) key += (k ? " " : "") + row[gc[k]];
    auto [it, inserted] = index.emplace(key, out.size());
    if (inserted) out.push_back({key, {}});
    out[it->second].points.emplace_back(number(row[xc]), number(row[yc]));
  }
  return out;
}

}  // namespace alefem::bench
