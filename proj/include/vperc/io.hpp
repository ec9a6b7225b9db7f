#pragma once

// Text formats for point sets, colourings and report rows.

#include <cstdio>
#include <algorithm>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vperc/geometry.hpp"
#include "vperc/percolation.hpp"

namespace vperc {

/// "n" on the first line, then one "x y" line per point. 17 significant
/// digits round-trip doubles exactly.
inline void write_points(std::ostream& os, const PointSet& ps) {
  char buf[64];
  os << ps.size() << '\n';
  for (Vec2 p : ps.points) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
    os << buf;
  }
}

/// Reads the point-set format. The region is the bounding box of the points
/// unless one is supplied.
inline PointSet read_points(std::istream& is, std::optional<Rectangle> region = std::nullopt) {
  std::size_t n = 0;
  if (!(is >> n)) throw std::runtime_error("read_points: missing count");
  std::vector<Vec2> pts(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!(is >> pts[i].x >> pts[i].y)) throw std::runtime_error("read_points: expected " + std::to_string(n) + " points");
  if (!region) {
    if (pts.empty()) throw std::runtime_error("read_points: empty point set needs a region");
    double x0 = pts[0].x, x1 = pts[0].x, y0 = pts[0].y, y1 = pts[0].y;
    for (Vec2 p : pts) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 == y0) y1 = y0 + 1.0;
    region = Rectangle(x0, y0, x1, y1);
  }
  return make_point_set(std::move(pts), *region);
}

/// One line of space-separated +1/-1.
inline void write_coloring(std::ostream& os, const Coloring& w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) os << ' ';
    os << (w[i] > 0 ? "+1" : "-1");
  }
  os << '\n';
}

inline Coloring read_coloring(std::istream& is) {
  Coloring w;
  std::string tok;
  while (is >> tok) {
    if (tok == "+1" || tok == "1") w.signs.push_back(1);
    else if (tok == "-1") w.signs.push_back(-1);
    else throw std::runtime_error("read_coloring: bad token '" + tok + "'");
  }
  return w;
}

/// "%.12g", the precision of every reported number.
inline std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace vperc
