#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "rspc/charts.hpp"
#include "rspc/report_io.hpp"

namespace rspc {

namespace detail {

// Linear data-to-pixel mapping over a fixed canvas.
struct Axis {
  double lo = 0.0, hi = 1.0, px_lo = 0.0, px_hi = 1.0;
  double operator()(double v) const {
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

inline std::string svg_open(int width, int height) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
         std::to_string(width) + " " + std::to_string(height) +
         "\" font-family=\"monospace\" font-size=\"11\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

inline std::string svg_line(double x1, double y1, double x2, double y2, const char* color,
                            const char* dash = nullptr) {
  std::string s = "<line x1=\"" + format_g6(x1) + "\" y1=\"" + format_g6(y1) + "\" x2=\"" +
                  format_g6(x2) + "\" y2=\"" + format_g6(y2) + "\" stroke=\"" + color + "\"";
  if (dash) s += std::string(" stroke-dasharray=\"") + dash + "\"";
  s += "/>\n";
  return s;
}

inline std::string svg_text(double x, double y, const std::string& text,
                            const char* anchor = "start") {
  return "<text x=\"" + format_g6(x) + "\" y=\"" + format_g6(y) + "\" text-anchor=\"" +
         anchor + "\">" + text + "</text>\n";
}

inline std::string svg_polyline(const std::vector<std::pair<double, double>>& pts,
                                const char* color) {
  std::string s = "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" points=\"";
  for (const auto& [x, y] : pts) s += format_g6(x) + "," + format_g6(y) + " ";
  s += "\"/>\n";
  return s;
}

inline std::string svg_y_ticks(const Axis& x, const Axis& y, int ticks = 5) {
  std::string s;
  for (int i = 0; i <= ticks; ++i) {
    const double v = y.lo + (y.hi - y.lo) * i / ticks;
    const double py = y(v);
    s += svg_line(x.px_lo - 4, py, x.px_lo, py, "#333");
    s += svg_text(x.px_lo - 8, py + 4, format_g6(v), "end");
  }
  return s;
}

}  // namespace detail

// Chart of subgroup means against the control limits.
inline std::string svg_xbar_chart(std::span<const double> means, const ControlLimits& limits,
                                  const std::string& title = "") {
  const int width = 800, height = 480;
  detail::Axis x{1.0, std::max<double>(2.0, static_cast<double>(means.size())), 60, width - 20};
  double lo = limits.lcl, hi = limits.ucl;
  for (double m : means) {
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  const double pad = (hi - lo) > 0 ? 0.08 * (hi - lo) : 1.0;
  detail::Axis y{hi + pad, lo - pad, 40, height - 40};  // inverted pixel axis

  std::string s = detail::svg_open(width, height);
  if (!title.empty()) s += detail::svg_text(width / 2.0, 20, title, "middle");
  s += detail::svg_line(x.px_lo, height - 40, x.px_hi, height - 40, "#333");
  s += detail::svg_line(x.px_lo, 40, x.px_lo, height - 40, "#333");
  s += detail::svg_y_ticks(x, y);

  s += detail::svg_line(x.px_lo, y(limits.ucl), x.px_hi, y(limits.ucl), "#d62728", "6,4");
  s += detail::svg_line(x.px_lo, y(limits.lcl), x.px_hi, y(limits.lcl), "#d62728", "6,4");
  s += detail::svg_line(x.px_lo, y(limits.cl), x.px_hi, y(limits.cl), "#2ca02c");
  s += detail::svg_text(x.px_hi + 2, y(limits.ucl) + 4, "UCL");
  s += detail::svg_text(x.px_hi + 2, y(limits.cl) + 4, "CL");
  s += detail::svg_text(x.px_hi + 2, y(limits.lcl) + 4, "LCL");

  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < means.size(); ++i)
    pts.emplace_back(x(static_cast<double>(i + 1)), y(means[i]));
  s += detail::svg_polyline(pts, "#1f77b4");
  for (const auto& [px, py] : pts)
    s += "<circle cx=\"" + detail::format_g6(px) + "\" cy=\"" + detail::format_g6(py) +
         "\" r=\"3\" fill=\"#1f77b4\"/>\n";

  for (std::size_t i = 0; i < means.size(); ++i) {
    const std::size_t every = means.size() > 20 ? 5 : 1;
    if (i % every == 0 || i + 1 == means.size())
      s += detail::svg_text(x(static_cast<double>(i + 1)), height - 24,
                            std::to_string(i + 1), "middle");
  }
  s += "</svg>\n";
  return s;
}

// LCL/CL/UCL of each method as functions of the contamination level.
inline std::string svg_sensitivity(const SensitivityResult& r, const std::string& title = "") {
  const int width = 800, height = 480;
  if (r.deltas.empty()) throw invalid_input("svg_sensitivity: empty sweep");
  detail::Axis x{r.deltas.front(),
                 r.deltas.back() > r.deltas.front() ? r.deltas.back()
                                                    : r.deltas.front() + 1.0,
                 60, width - 20};
  double lo = r.limits[0][0].lcl, hi = r.limits[0][0].ucl;
  for (const auto& per_method : r.limits)
    for (const ControlLimits& l : per_method) {
      lo = std::min(lo, l.lcl);
      hi = std::max(hi, l.ucl);
    }
  const double pad = (hi - lo) > 0 ? 0.08 * (hi - lo) : 1.0;
  detail::Axis y{hi + pad, lo - pad, 40, height - 40};

  const char* colors[] = {"#d62728", "#2ca02c", "#1f77b4"};
  std::string s = detail::svg_open(width, height);
  if (!title.empty()) s += detail::svg_text(width / 2.0, 20, title, "middle");
  s += detail::svg_line(x.px_lo, height - 40, x.px_hi, height - 40, "#333");
  s += detail::svg_line(x.px_lo, 40, x.px_lo, height - 40, "#333");
  s += detail::svg_y_ticks(x, y);
  for (int i = 0; i <= 5; ++i) {
    const double v = x.lo + (x.hi - x.lo) * i / 5;
    s += detail::svg_text(x(v), height - 24, detail::format_g6(v), "middle");
  }

  for (std::size_t mi = 0; mi < r.methods.size(); ++mi) {
    const char* color = colors[mi % 3];
    for (int which = 0; which < 3; ++which) {
      std::vector<std::pair<double, double>> pts;
      for (std::size_t di = 0; di < r.deltas.size(); ++di) {
        const ControlLimits& l = r.limits[mi][di];
        const double v = which == 0 ? l.lcl : which == 1 ? l.cl : l.ucl;
        pts.emplace_back(x(r.deltas[di]), y(v));
      }
      s += detail::svg_polyline(pts, color);
    }
    s += detail::svg_text(x.px_lo + 10 + 120.0 * static_cast<double>(mi), 34,
                          std::string("Method-") + name(r.methods[mi]));
    s += detail::svg_line(x.px_lo + 10 + 120.0 * static_cast<double>(mi) - 8, 30,
                          x.px_lo + 10 + 120.0 * static_cast<double>(mi) - 2, 30, color);
  }
  s += "</svg>\n";
  return s;
}

}  // namespace rspc
