#pragma once

// Static SVG figures: the size function over a rectangle of the half-plane
// {x < y} with labelled constancy regions, and the cornerpoint diagram.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "sizefn/sublevel.hpp"

namespace sizefn {

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string svg_header(int w, int h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
         std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

// Pale fill per integer value, cycling through a fixed palette.
inline const char* region_color(std::size_t v) {
  static const char* palette[] = {"#f7f7f7", "#dbe9f6", "#bad6eb", "#f6e0b5", "#d9f0d3",
                                  "#f4cccc", "#e1d5e7", "#fff2cc", "#d0e0e3"};
  return palette[v % (sizeof palette / sizeof *palette)];
}

inline std::string axes(double lo, double hi, double x0, double y0, double side, const std::string& xl,
                        const std::string& yl) {
  std::string s;
  s += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y0) + "\" width=\"" + fmt(side) + "\" height=\"" +
       fmt(side) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    const double px = x0 + side * i / 4.0;
    const double py = y0 + side - side * i / 4.0;
    s += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(y0 + side + 16) + "\" text-anchor=\"middle\">" +
         fmt(v) + "</text>\n";
    s += "<text x=\"" + fmt(x0 - 6) + "\" y=\"" + fmt(py + 4) + "\" text-anchor=\"end\">" + fmt(v) +
         "</text>\n";
  }
  s += "<text x=\"" + fmt(x0 + side / 2) + "\" y=\"" + fmt(y0 + side + 34) + "\" text-anchor=\"middle\">" +
       xl + "</text>\n";
  s += "<text x=\"" + fmt(x0 - 40) + "\" y=\"" + fmt(y0 + side / 2) + "\" text-anchor=\"middle\">" + yl +
       "</text>\n";
  return s;
}

}  // namespace detail

struct PlotWindow {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = 120;  // cells per axis for the region plot
};

/// Window covering every finite coordinate of the series with a 15% margin.
inline PlotWindow default_window(const FormalSeries& s) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& p : s.points()) {
    lo = std::min(lo, p.x);
    hi = std::max(hi, p.x);
    if (!p.is_cornerline()) hi = std::max(hi, p.y);
  }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  if (hi - lo < 1e-9) hi = lo + 1.0;
  const double m = 0.15 * (hi - lo);
  return {lo - m, hi + m, 120};
}

/// Value of the size function on every grid cell centre with x < y; -1 elsewhere.
inline std::vector<long> region_grid(const FormalSeries& s, const PlotWindow& w) {
  std::vector<long> val(w.n * w.n, -1);
  const double h = (w.hi - w.lo) / static_cast<double>(w.n);
  for (std::size_t i = 0; i < w.n; ++i)
    for (std::size_t j = 0; j < w.n; ++j) {
      const double x = w.lo + (i + 0.5) * h;
      const double y = w.lo + (j + 0.5) * h;
      if (x < y) val[i * w.n + j] = static_cast<long>(evaluate_from_series(s, x, y));
    }
  return val;
}

/// Region plot: cells coloured by value, one integer label per connected
/// constancy region, cornerpoints as dots and cornerlines as dashed verticals.
inline std::string region_plot_svg(const FormalSeries& s, const PlotWindow& w) {
  if (w.n < 2 || !(w.lo < w.hi)) throw std::invalid_argument("invalid plot window");
  const double x0 = 60, y0 = 20, side = 480;
  const double cell = side / static_cast<double>(w.n);
  auto px = [&](double x) { return x0 + (x - w.lo) / (w.hi - w.lo) * side; };
  auto py = [&](double y) { return y0 + side - (y - w.lo) / (w.hi - w.lo) * side; };
  const auto val = region_grid(s, w);

  std::string out = detail::svg_header(600, 580);
  for (std::size_t i = 0; i < w.n; ++i)
    for (std::size_t j = 0; j < w.n; ++j) {
      const long v = val[i * w.n + j];
      if (v < 0) continue;
      out += "<rect x=\"" + detail::fmt(x0 + i * cell) + "\" y=\"" + detail::fmt(y0 + side - (j + 1) * cell) +
             "\" width=\"" + detail::fmt(cell + 0.05) + "\" height=\"" + detail::fmt(cell + 0.05) +
             "\" fill=\"" + detail::region_color(static_cast<std::size_t>(v)) + "\"/>\n";
    }

  // Label each 4-connected region at its cell closest to the region centroid.
  std::vector<char> seen(val.size(), 0);
  std::vector<std::size_t> stack, members;
  for (std::size_t start = 0; start < val.size(); ++start) {
    if (seen[start] || val[start] < 0) continue;
    members.clear();
    stack = {start};
    seen[start] = 1;
    while (!stack.empty()) {
      const auto c = stack.back();
      stack.pop_back();
      members.push_back(c);
      const std::size_t i = c / w.n, j = c % w.n;
      const std::size_t nb[4] = {i > 0 ? c - w.n : c, i + 1 < w.n ? c + w.n : c, j > 0 ? c - 1 : c,
                                 j + 1 < w.n ? c + 1 : c};
      for (auto d : nb)
        if (!seen[d] && val[d] == val[start]) {
          seen[d] = 1;
          stack.push_back(d);
        }
    }
    if (members.size() < 4) continue;
    double ci = 0, cj = 0;
    for (auto c : members) ci += c / w.n, cj += c % w.n;
    ci /= members.size();
    cj /= members.size();
    std::size_t best = members.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (auto c : members) {
      const double d = std::hypot(c / w.n - ci, c % w.n - cj);
      if (d < best_d) best_d = d, best = c;
    }
    const double cx = x0 + (best / w.n + 0.5) * cell;
    const double cy = y0 + side - (best % w.n + 0.5) * cell;
    out += "<text class=\"region-label\" x=\"" + detail::fmt(cx) + "\" y=\"" + detail::fmt(cy + 4) +
           "\" text-anchor=\"middle\" font-weight=\"bold\">" + std::to_string(val[start]) + "</text>\n";
  }

  out += "<line x1=\"" + detail::fmt(px(w.lo)) + "\" y1=\"" + detail::fmt(py(w.lo)) + "\" x2=\"" +
         detail::fmt(px(w.hi)) + "\" y2=\"" + detail::fmt(py(w.hi)) + "\" stroke=\"black\"/>\n";
  for (const auto& p : s.points()) {
    if (p.is_cornerline()) {
      out += "<line class=\"cornerline\" x1=\"" + detail::fmt(px(p.x)) + "\" y1=\"" + detail::fmt(py(w.hi)) +
             "\" x2=\"" + detail::fmt(px(p.x)) + "\" y2=\"" + detail::fmt(py(std::max(p.x, w.lo))) +
             "\" stroke=\"#b22222\" stroke-dasharray=\"6 3\"/>\n";
    } else {
      out += "<circle class=\"cornerpoint\" cx=\"" + detail::fmt(px(p.x)) + "\" cy=\"" + detail::fmt(py(p.y)) +
             "\" r=\"4\" fill=\"#b22222\"/>\n";
    }
  }
  out += detail::axes(w.lo, w.hi, x0, y0, side, "x", "y");
  out += "</svg>\n";
  return out;
}

/// Diagram plot: diagonal, proper cornerpoints (multiplicity > 1 annotated)
/// and cornerlines as vertical lines.
inline std::string diagram_svg(const FormalSeries& s, const PlotWindow& w) {
  if (!(w.lo < w.hi)) throw std::invalid_argument("invalid plot window");
  const double x0 = 60, y0 = 20, side = 480;
  auto px = [&](double x) { return x0 + (x - w.lo) / (w.hi - w.lo) * side; };
  auto py = [&](double y) { return y0 + side - (y - w.lo) / (w.hi - w.lo) * side; };
  std::string out = detail::svg_header(600, 580);
  out += "<line class=\"diagonal\" x1=\"" + detail::fmt(px(w.lo)) + "\" y1=\"" + detail::fmt(py(w.lo)) +
         "\" x2=\"" + detail::fmt(px(w.hi)) + "\" y2=\"" + detail::fmt(py(w.hi)) + "\" stroke=\"gray\"/>\n";
  for (const auto& p : s.points()) {
    if (p.is_cornerline()) {
      out += "<line class=\"cornerline\" x1=\"" + detail::fmt(px(p.x)) + "\" y1=\"" + detail::fmt(py(w.hi)) +
             "\" x2=\"" + detail::fmt(px(p.x)) + "\" y2=\"" + detail::fmt(py(std::max(p.x, w.lo))) +
             "\" stroke=\"#1f4e79\" stroke-width=\"2\"/>\n";
    } else {
      out += "<circle class=\"cornerpoint\" cx=\"" + detail::fmt(px(p.x)) + "\" cy=\"" + detail::fmt(py(p.y)) +
             "\" r=\"4\" fill=\"#1f4e79\"/>\n";
    }
    if (p.multiplicity > 1)
      out += "<text x=\"" + detail::fmt(px(p.x) + 6) + "\" y=\"" +
             detail::fmt((p.is_cornerline() ? py(w.hi) + 14 : py(p.y)) - 6) + "\">" +
             std::to_string(p.multiplicity) + "</text>\n";
  }
  out += detail::axes(w.lo, w.hi, x0, y0, side, "x", "y");
  out += "</svg>\n";
  return out;
}

}  // namespace sizefn
