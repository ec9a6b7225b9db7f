#pragma once

// Incremental Delaunay triangulation (Lawson flips, walking point location,
// Hilbert insertion order). Four far-away guard vertices enclose the input so
// every input site is interior and its Voronoi cell is bounded.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "vperc/shapes.hpp"

namespace vperc::detail {

inline double orient2d(Vec2 a, Vec2 b, Vec2 c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

/// Positive when `d` lies strictly inside the circle through the
/// counterclockwise triangle (a, b, c). Evaluated in double precision with a
/// static error filter, falling back to extended precision near zero.
inline double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  double adx = a.x - d.x, ady = a.y - d.y;
  double bdx = b.x - d.x, bdy = b.y - d.y;
  double cdx = c.x - d.x, cdy = c.y - d.y;
  double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  double cdxady = cdx * ady, adxcdy = adx * cdy;
  double adxbdy = adx * bdy, bdxady = bdx * ady;
  double alift = adx * adx + ady * ady;
  double blift = bdx * bdx + bdy * bdy;
  double clift = cdx * cdx + cdy * cdy;
  double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift + (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                     (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  constexpr double kErrBound = 1.2e-15;  // (10 + 96 eps) eps, rounded up
  if (std::abs(det) > kErrBound * permanent) return det;
  long double ax = adx, ay = ady, bx = bdx, by = bdy, cx = cdx, cy = cdy;
  long double al = ax * ax + ay * ay, bl = bx * bx + by * by, cl = cx * cx + cy * cy;
  return static_cast<double>(al * (bx * cy - by * cx) + bl * (cx * ay - cy * ax) + cl * (ax * by - ay * bx));
}

inline Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  double bx = b.x - a.x, by = b.y - a.y;
  double cx = c.x - a.x, cy = c.y - a.y;
  double d = 2.0 * (bx * cy - by * cx);
  double b2 = bx * bx + by * by;
  double c2 = cx * cx + cy * cy;
  return {a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d};
}

inline std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y, int order) {
  std::uint64_t d = 0;
  for (std::uint32_t s = 1u << (order - 1); s > 0; s >>= 1) {
    std::uint32_t rx = (x & s) ? 1 : 0;
    std::uint32_t ry = (y & s) ? 1 : 0;
    d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = s - 1 - x;
        y = s - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

class Triangulation {
 public:
  struct Tri {
    std::array<int, 3> v;   // counterclockwise
    std::array<int, 3> nb;  // nb[i] is across the edge opposite v[i]; -1 on the hull
  };

  /// Triangulates `sites` plus four guard vertices placed well outside the
  /// bounding box of `sites` and `frame`. Sites closer than `merge_tol` to an
  /// existing vertex are not inserted and are reported by duplicates().
  Triangulation(const std::vector<Vec2>& sites, const Rectangle& frame, double merge_tol)
      : num_sites_(static_cast<int>(sites.size())) {
    pts_ = sites;
    double minx = frame.x0, miny = frame.y0, maxx = frame.x1, maxy = frame.y1;
    for (const Vec2& p : sites) {
      minx = std::min(minx, p.x);
      miny = std::min(miny, p.y);
      maxx = std::max(maxx, p.x);
      maxy = std::max(maxy, p.y);
    }
    Vec2 c{0.5 * (minx + maxx), 0.5 * (miny + maxy)};
    double span = std::hypot(maxx - minx, maxy - miny);
    // Irregular offsets keep the guards out of cocircular configurations with
    // symmetric inputs.
    const double gx[4] = {-4.10, 4.30, 3.95, -4.02};
    const double gy[4] = {-3.90, -4.05, 4.20, 4.11};
    for (int k = 0; k < 4; ++k) pts_.push_back({c.x + gx[k] * span, c.y + gy[k] * span});
    inserted_.assign(pts_.size(), 1);
    vert_tri_.assign(pts_.size(), -1);

    int g = num_sites_;
    tris_.push_back({{g, g + 1, g + 2}, {-1, 1, -1}});
    tris_.push_back({{g, g + 2, g + 3}, {-1, -1, 0}});
    vert_tri_[g] = 0;
    vert_tri_[g + 1] = 0;
    vert_tri_[g + 2] = 0;
    vert_tri_[g + 3] = 1;

    std::vector<int> order(static_cast<std::size_t>(num_sites_));
    std::iota(order.begin(), order.end(), 0);
    if (num_sites_ > 2) {
      std::vector<std::uint64_t> key(order.size());
      double sx = maxx > minx ? 65535.0 / (maxx - minx) : 0.0;
      double sy = maxy > miny ? 65535.0 / (maxy - miny) : 0.0;
      for (int i = 0; i < num_sites_; ++i) {
        auto hx = static_cast<std::uint32_t>((sites[i].x - minx) * sx);
        auto hy = static_cast<std::uint32_t>((sites[i].y - miny) * sy);
        key[i] = hilbert_index(hx, hy, 16);
      }
      std::sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b] || (key[a] == key[b] && a < b); });
    }
    int last = 0;
    for (int i : order) last = insert(i, last, merge_tol);
  }

  int num_sites() const { return num_sites_; }
  bool is_site(int v) const { return v >= 0 && v < num_sites_; }
  const std::vector<Vec2>& points() const { return pts_; }
  const std::vector<Tri>& triangles() const { return tris_; }
  int incident_triangle(int v) const { return vert_tri_[v]; }
  const std::vector<int>& duplicates() const { return duplicates_; }

  static int index_in(const Tri& t, int v) {
    return t.v[0] == v ? 0 : (t.v[1] == v ? 1 : (t.v[2] == v ? 2 : -1));
  }

 private:
  int locate(Vec2 p, int start) const {
    int t = start;
    std::size_t cap = 4 * tris_.size() + 64;
    unsigned rot = 0;
    for (std::size_t step = 0; step < cap; ++step) {
      const Tri& tri = tris_[t];
      int next = -1;
      for (int j = 0; j < 3; ++j) {
        int k = static_cast<int>((j + rot) % 3);
        if (orient2d(pts_[tri.v[(k + 1) % 3]], pts_[tri.v[(k + 2) % 3]], p) < 0.0) {
          next = tri.nb[k];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
      ++rot;
    }
    // Inconsistent rounding cycled the walk; scan instead.
    for (std::size_t k = 0; k < tris_.size(); ++k) {
      const Tri& tri = tris_[k];
      if (orient2d(pts_[tri.v[0]], pts_[tri.v[1]], p) >= 0.0 && orient2d(pts_[tri.v[1]], pts_[tri.v[2]], p) >= 0.0 &&
          orient2d(pts_[tri.v[2]], pts_[tri.v[0]], p) >= 0.0)
        return static_cast<int>(k);
    }
    throw std::runtime_error("delaunay: point location failed");
  }

  void replace_neighbor(int t, int old_nb, int new_nb) {
    if (t < 0) return;
    for (int k = 0; k < 3; ++k)
      if (tris_[t].nb[k] == old_nb) {
        tris_[t].nb[k] = new_nb;
        return;
      }
  }

  void rotate_to(int t, int v) {
    Tri& tri = tris_[t];
    int k = index_in(tri, v);
    if (k == 0) return;
    tri.v = {tri.v[k], tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]};
    tri.nb = {tri.nb[k], tri.nb[(k + 1) % 3], tri.nb[(k + 2) % 3]};
  }

  int insert(int i, int hint, double merge_tol) {
    Vec2 p = pts_[i];
    int t = locate(p, hint);
    const Tri tri = tris_[t];
    for (int k = 0; k < 3; ++k) {
      if (distance(pts_[tri.v[k]], p) <= merge_tol) {
        duplicates_.push_back(i);
        inserted_[i] = 0;
        return t;
      }
    }
    double o[3];
    for (int k = 0; k < 3; ++k) o[k] = orient2d(pts_[tri.v[(k + 1) % 3]], pts_[tri.v[(k + 2) % 3]], p);
    int on_edge = -1;
    for (int k = 0; k < 3; ++k)
      if (o[k] == 0.0) on_edge = k;
    stack_.clear();
    int result;
    if (on_edge >= 0 && tri.nb[on_edge] >= 0) {
      result = split_edge(t, on_edge, i);
    } else {
      result = split_triangle(t, i);
    }
    legalize(i);
    return result;
  }

  int split_triangle(int t, int p) {
    auto [a, b, c] = tris_[t].v;
    auto [na, nb, nc] = tris_[t].nb;
    int t1 = static_cast<int>(tris_.size());
    int t2 = t1 + 1;
    tris_[t] = {{p, b, c}, {na, t1, t2}};
    tris_.push_back({{p, c, a}, {nb, t2, t}});
    tris_.push_back({{p, a, b}, {nc, t, t1}});
    replace_neighbor(nb, t, t1);
    replace_neighbor(nc, t, t2);
    vert_tri_[p] = t;
    vert_tri_[b] = t;
    vert_tri_[c] = t;
    vert_tri_[a] = t1;
    stack_.push_back(t);
    stack_.push_back(t1);
    stack_.push_back(t2);
    return t;
  }

  // p lies on the edge opposite v[k] of t.
  int split_edge(int t, int k, int p) {
    rotate_to(t, tris_[t].v[k]);
    auto [a, b, c] = tris_[t].v;
    int u = tris_[t].nb[0];
    int tn1 = tris_[t].nb[1];  // across c-a
    int tn2 = tris_[t].nb[2];  // across a-b
    int j = -1;
    for (int q = 0; q < 3; ++q)
      if (tris_[u].nb[q] == t) j = q;
    rotate_to(u, tris_[u].v[j]);
    int d = tris_[u].v[0];  // u = (d, c, b)
    int un1 = tris_[u].nb[1];  // across b-d
    int un2 = tris_[u].nb[2];  // across d-c
    int t2 = static_cast<int>(tris_.size());
    int u2 = t2 + 1;
    // t = (p, a, b), t2 = (p, c, a), u = (p, b, d), u2 = (p, d, c)
    tris_[t] = {{p, a, b}, {tn2, u, t2}};
    tris_.push_back({{p, c, a}, {tn1, t, u2}});
    tris_[u] = {{p, b, d}, {un1, u2, t}};
    tris_.push_back({{p, d, c}, {un2, t2, u}});
    replace_neighbor(tn1, t, t2);
    replace_neighbor(un2, u, u2);
    vert_tri_[p] = t;
    vert_tri_[a] = t;
    vert_tri_[b] = t;
    vert_tri_[c] = t2;
    vert_tri_[d] = u;
    for (int q : {t, t2, u, u2}) stack_.push_back(q);
    return t;
  }

  // Every triangle on the stack has the new vertex p at v[0]; the edge to
  // check is the one opposite p.
  void legalize(int p) {
    while (!stack_.empty()) {
      int t = stack_.back();
      stack_.pop_back();
      rotate_to(t, p);
      int u = tris_[t].nb[0];
      if (u < 0) continue;
      int j = -1;
      for (int q = 0; q < 3; ++q)
        if (tris_[u].nb[q] == t) j = q;
      int d = tris_[u].v[j];
      const Tri& tt = tris_[t];
      if (incircle(pts_[tt.v[0]], pts_[tt.v[1]], pts_[tt.v[2]], pts_[d]) <= 0.0) continue;
      rotate_to(u, d);
      auto [pp, b, c] = tris_[t].v;
      int a1 = tris_[t].nb[1];
      int a2 = tris_[t].nb[2];
      int b1 = tris_[u].nb[1];
      int b2 = tris_[u].nb[2];
      tris_[t] = {{pp, b, d}, {b1, u, a2}};
      tris_[u] = {{pp, d, c}, {b2, a1, t}};
      replace_neighbor(b1, u, t);
      replace_neighbor(a1, t, u);
      vert_tri_[pp] = t;
      vert_tri_[b] = t;
      vert_tri_[d] = t;
      vert_tri_[c] = u;
      stack_.push_back(t);
      stack_.push_back(u);
    }
  }

  int num_sites_;
  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> vert_tri_;
  std::vector<char> inserted_;
  std::vector<int> duplicates_;
  std::vector<int> stack_;
};

}  // namespace vperc::detail
