#pragma once

// Fixtures and brute-force oracles shared by the test binaries. The oracles
// deliberately avoid the library's search and flow code.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <queue>
#include <vector>

#include "vperc/vperc.hpp"

namespace testing_support {

using namespace vperc;

inline VoronoiGraph unit_instance(std::vector<Vec2> pts) {
  return build_tessellation(make_point_set(std::move(pts), Rectangle::unit_square()), Rectangle::unit_square());
}

inline VoronoiGraph single_cell() { return unit_instance({{0.5, 0.5}}); }
inline VoronoiGraph vertical_halves() { return unit_instance({{0.25, 0.5}, {0.75, 0.5}}); }
inline VoronoiGraph horizontal_halves() { return unit_instance({{0.5, 0.25}, {0.5, 0.75}}); }

/// Unit-density instance on a square of area n.
inline VoronoiGraph random_instance(std::size_t n, Seed seed, RegionMode mode = RegionMode::plane()) {
  Rectangle R = Rectangle::with_area(static_cast<double>(n));
  return build_tessellation(sample_binomial(n, R, mode, seed), R);
}

/// Instance on the unit square with n sites.
inline VoronoiGraph random_unit_instance(std::size_t n, Seed seed) {
  Rectangle R = Rectangle::unit_square();
  return build_tessellation(sample_binomial(n, R, RegionMode::plane(), seed), R);
}

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

/// Crossing by union-find over adjacent same-coloured pairs.
inline bool oracle_crossing(const VoronoiGraph& g, const std::vector<int>& sign, int colour, Side from, Side to) {
  const int n = static_cast<int>(g.size());
  UnionFind uf(n + 2);
  const int A = n, B = n + 1;
  for (int c = 0; c < n; ++c) {
    if (sign[c] != colour || !g.in_target(c)) continue;
    if (g.touches(c, from)) uf.unite(c, A);
    if (g.touches(c, to)) uf.unite(c, B);
    for (CellId d : g.neighbors(c))
      if (sign[d] == colour) uf.unite(c, d);
  }
  return uf.find(A) == uf.find(B);
}

inline std::vector<int> signs_of(const Coloring& w) { return {w.signs.begin(), w.signs.end()}; }

inline std::vector<int> signs_from_mask(std::size_t n, std::uint64_t mask) {
  std::vector<int> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = ((mask >> i) & 1u) ? 1 : -1;
  return s;
}

/// Vertex-disjoint monochromatic bottom-top paths by Ford-Fulkerson with DFS on
/// an explicit capacity matrix of the split graph.
inline int oracle_disjoint_crossings(const VoronoiGraph& g, const std::vector<int>& sign, int colour) {
  const int n = static_cast<int>(g.size());
  const int N = 2 * n + 2, S = 2 * n, T = 2 * n + 1;
  std::vector<std::vector<int>> cap(N, std::vector<int>(N, 0));
  for (int c = 0; c < n; ++c) {
    if (sign[c] != colour || !g.in_target(c)) continue;
    cap[2 * c][2 * c + 1] = 1;
    if (g.touches(c, Side::Bottom)) cap[S][2 * c] = 1;
    if (g.touches(c, Side::Top)) cap[2 * c + 1][T] = 1;
    for (CellId d : g.neighbors(c))
      if (sign[d] == colour) cap[2 * c + 1][2 * d] = 1;
  }
  int flow = 0;
  for (;;) {
    std::vector<int> prev(N, -1);
    std::vector<int> stack{S};
    prev[S] = S;
    while (!stack.empty() && prev[T] < 0) {
      int v = stack.back();
      stack.pop_back();
      for (int u = 0; u < N; ++u)
        if (cap[v][u] > 0 && prev[u] < 0) {
          prev[u] = v;
          stack.push_back(u);
        }
    }
    if (prev[T] < 0) return flow;
    for (int v = T; v != S; v = prev[v]) {
      --cap[prev[v]][v];
      ++cap[v][prev[v]];
    }
    ++flow;
  }
}

inline std::size_t nearest_site(const VoronoiGraph& g, Vec2 p) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < g.size(); ++i)
    if (norm2(g.site(static_cast<CellId>(i)) - p) < norm2(g.site(static_cast<CellId>(best)) - p)) best = i;
  return best;
}

inline double polygon_area(std::span<const Vec2> v) {
  double a = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) a += cross(v[k], v[(k + 1) % v.size()]);
  return 0.5 * a;
}

}  // namespace testing_support
