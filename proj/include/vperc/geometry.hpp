#pragma once

// Random site sets and their Voronoi tessellation clipped to a target
// rectangle, with a labelled counterclockwise boundary ring per cell.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vperc/detail/delaunay.hpp"
#include "vperc/rng.hpp"
#include "vperc/shapes.hpp"

namespace vperc {

using CellId = std::int32_t;

/// Ring labels: a non-negative label is the neighbouring cell, a negative one
/// is a side of the target rectangle.
inline constexpr CellId side_label(Side s) { return -1 - static_cast<CellId>(s); }
inline constexpr bool is_side_label(CellId label) { return label < 0 && label >= -4; }
inline constexpr Side label_side(CellId label) { return static_cast<Side>(-1 - label); }

enum class RegionKind { Plane, HalfPlane };

struct RegionMode {
  RegionKind kind = RegionKind::Plane;
  double padding = 0.0;

  static RegionMode plane(double padding = 0.0) { return {RegionKind::Plane, padding}; }
  static RegionMode half_plane(double padding = 0.0) { return {RegionKind::HalfPlane, padding}; }
};

/// Margin that lets a tessellation of `target` behave like one of the whole
/// plane: max(3, log(area)) in unit-intensity length units.
inline double plane_emulation_padding(const Rectangle& target) {
  return std::max(3.0, std::log(target.area()));
}

/// Region the sites are drawn from: `rect` grown by the padding, then cut to
/// x >= 0 in half-plane mode.
inline Rectangle sampling_region(const Rectangle& rect, const RegionMode& mode) {
  if (!(mode.padding >= 0.0)) throw std::invalid_argument("padding must be nonnegative");
  Rectangle r = mode.padding > 0.0 ? rect.padded(mode.padding) : rect;
  if (mode.kind == RegionKind::HalfPlane) {
    if (!(r.x1 > 0.0)) throw std::invalid_argument("half-plane region is empty");
    r = Rectangle(std::max(r.x0, 0.0), r.y0, r.x1, r.y1);
  }
  return r;
}

struct PointSet {
  std::vector<Vec2> points;
  Rectangle region;
  RegionMode mode;
  Seed seed = 0;

  std::size_t size() const { return points.size(); }
};

/// Hand-built point set, e.g. for fixtures and files.
inline PointSet make_point_set(std::vector<Vec2> points, const Rectangle& region, Seed seed = 0) {
  return PointSet{std::move(points), region, RegionMode::plane(), seed};
}

namespace detail {

// Sites closer than this (in unit-intensity length units) count as coincident.
inline constexpr double kCoincidenceTol = 1e-12;

inline double unit_length(const Rectangle& region, std::size_t n) {
  return std::sqrt(region.area() / static_cast<double>(std::max<std::size_t>(n, 1)));
}

inline Vec2 uniform_in(const Rectangle& r, Rng& rng) {
  double u = uniform01(rng);
  double v = uniform01(rng);
  return {r.x0 + u * r.width(), r.y0 + v * r.height()};
}

// Redraws sites that coincide (within tolerance) with an earlier site, from
// the same stream.
inline void resample_coincident(std::vector<Vec2>& pts, const Rectangle& region, Rng& rng) {
  double tol = kCoincidenceTol * unit_length(region, pts.size());
  for (int round = 0; round < 16; ++round) {
    std::vector<std::size_t> order(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a].x < pts[b].x; });
    bool changed = false;
    for (std::size_t k = 0; k < order.size(); ++k) {
      for (std::size_t j = k + 1; j < order.size() && pts[order[j]].x - pts[order[k]].x <= tol; ++j) {
        if (distance(pts[order[j]], pts[order[k]]) <= tol) {
          pts[std::max(order[j], order[k])] = uniform_in(region, rng);
          changed = true;
        }
      }
    }
    if (!changed) return;
  }
}

}  // namespace detail

/// n sites drawn independently and uniformly from the (padded, mode-clipped)
/// region around `rect`.
inline PointSet sample_binomial(std::size_t n, const Rectangle& rect, const RegionMode& mode, Seed seed) {
  if (n == 0) throw std::invalid_argument("sample_binomial: n must be at least 1");
  Rectangle region = sampling_region(rect, mode);
  Rng rng = make_rng(seed);
  PointSet ps{{}, region, mode, seed};
  ps.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ps.points.push_back(detail::uniform_in(region, rng));
  detail::resample_coincident(ps.points, region, rng);
  return ps;
}

/// Poisson process of the given intensity on the (padded, mode-clipped)
/// region around `rect`.
inline PointSet sample_poisson(double intensity, const Rectangle& rect, const RegionMode& mode, Seed seed) {
  if (!(intensity > 0.0) || !std::isfinite(intensity)) throw std::invalid_argument("sample_poisson: intensity must be positive");
  Rectangle region = sampling_region(rect, mode);
  Rng rng = make_rng(seed);
  std::poisson_distribution<long long> count(intensity * region.area());
  long long n = count(rng);
  PointSet ps{{}, region, mode, seed};
  ps.points.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) ps.points.push_back(detail::uniform_in(region, rng));
  detail::resample_coincident(ps.points, region, rng);
  return ps;
}

/// Thrown when a site configuration stays degenerate (coincident or
/// cocircular sites, Voronoi vertices on the target boundary) after the
/// perturbation retries.
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Voronoi tessellation of a site set clipped to a target rectangle.
///
/// Each cell stores its clipped polygon as a counterclockwise ring: vertex k
/// starts edge k, whose label is the cell across it or a side of the target.
/// Cells whose Voronoi cell misses the target have an empty ring. Neighbour
/// lists follow ring order, so they are in counterclockwise rotation order.
class VoronoiGraph {
 public:
  std::size_t size() const { return sites_.size(); }
  const Rectangle& target() const { return target_; }
  std::span<const Vec2> sites() const { return sites_; }
  Vec2 site(CellId c) const { return sites_[static_cast<std::size_t>(c)]; }
  bool valid(CellId c) const { return c >= 0 && static_cast<std::size_t>(c) < sites_.size(); }

  std::span<const Vec2> ring_vertices(CellId c) const {
    return {ring_pts_.data() + ring_off_[c], ring_pts_.data() + ring_off_[c + 1]};
  }
  std::span<const CellId> ring_labels(CellId c) const {
    return {ring_lab_.data() + ring_off_[c], ring_lab_.data() + ring_off_[c + 1]};
  }
  std::span<const CellId> neighbors(CellId c) const {
    return {nbr_.data() + nbr_off_[c], nbr_.data() + nbr_off_[c + 1]};
  }
  /// Index in the ring of `c` of the edge labelled `label`, or -1.
  int ring_index(CellId c, CellId label) const {
    auto labs = ring_labels(c);
    for (std::size_t k = 0; k < labs.size(); ++k)
      if (labs[k] == label) return static_cast<int>(k);
    return -1;
  }

  bool touches(CellId c, Side s) const { return (side_mask_[c] >> static_cast<int>(s)) & 1u; }
  unsigned side_mask(CellId c) const { return side_mask_[c]; }
  double area(CellId c) const { return area_[c]; }
  bool in_target(CellId c) const { return ring_off_[c + 1] > ring_off_[c]; }

  /// Cells meeting side `s` in a segment, ordered along the side (left to
  /// right for bottom/top, bottom to top for left/right).
  std::span<const CellId> side_cells(Side s) const { return side_cells_[static_cast<int>(s)]; }

  /// Number of unordered adjacent pairs.
  std::size_t adjacency_pairs() const { return nbr_.size() / 2; }

  /// Position of `c` in side_cells(s), or -1.
  int side_rank(CellId c, Side s) const { return side_rank_[static_cast<int>(s)][c]; }

  /// Number of perturbation rounds that were needed to reach general position.
  int perturbation_rounds() const { return perturbation_rounds_; }

 private:
  friend VoronoiGraph build_tessellation(const PointSet& ps, const Rectangle& target);

  Rectangle target_;
  std::vector<Vec2> sites_;
  std::vector<std::size_t> ring_off_;
  std::vector<Vec2> ring_pts_;
  std::vector<CellId> ring_lab_;
  std::vector<std::size_t> nbr_off_;
  std::vector<CellId> nbr_;
  std::vector<unsigned> side_mask_;
  std::vector<double> area_;
  std::vector<CellId> side_cells_[4];
  std::vector<int> side_rank_[4];
  int perturbation_rounds_ = 0;
};

namespace detail {

struct ClippedSegment {
  Vec2 a, b;
  int side_a = -1;  // side the start was clipped on, -1 if it is the original endpoint
  int side_b = -1;
};

// Liang-Barsky clip of p->q against r. Boundary hits are snapped exactly onto
// the side so both adjacent cells agree bit for bit.
inline std::optional<ClippedSegment> clip_segment(Vec2 p, Vec2 q, const Rectangle& r) {
  if (p.x > r.x0 && p.x < r.x1 && p.y > r.y0 && p.y < r.y1 && q.x > r.x0 && q.x < r.x1 && q.y > r.y0 && q.y < r.y1)
    return ClippedSegment{p, q, -1, -1};
  double t0 = 0.0, t1 = 1.0;
  int s0 = -1, s1 = -1;
  double dx = q.x - p.x, dy = q.y - p.y;
  const double pk[4] = {-dy, dx, dy, -dx};
  const double qk[4] = {p.y - r.y0, r.x1 - p.x, r.y1 - p.y, p.x - r.x0};
  const int sides[4] = {static_cast<int>(Side::Bottom), static_cast<int>(Side::Right), static_cast<int>(Side::Top),
                        static_cast<int>(Side::Left)};
  for (int k = 0; k < 4; ++k) {
    if (pk[k] == 0.0) {
      if (qk[k] < 0.0) return std::nullopt;
      continue;
    }
    double t = qk[k] / pk[k];
    if (pk[k] < 0.0) {
      if (t > t1) return std::nullopt;
      if (t > t0) {
        t0 = t;
        s0 = sides[k];
      }
    } else {
      if (t < t0) return std::nullopt;
      if (t < t1) {
        t1 = t;
        s1 = sides[k];
      }
    }
  }
  if (!(t0 < t1)) return std::nullopt;
  auto at = [&](double t, int side) {
    Vec2 v{p.x + t * dx, p.y + t * dy};
    switch (side) {
      case 0: v.y = r.y0; break;
      case 1: v.x = r.x1; break;
      case 2: v.y = r.y1; break;
      case 3: v.x = r.x0; break;
      default: break;
    }
    return v;
  };
  ClippedSegment out;
  out.a = s0 < 0 ? p : at(t0, s0);
  out.b = s1 < 0 ? q : at(t1, s1);
  out.side_a = s0;
  out.side_b = s1;
  return out;
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = norm2(ab);
  double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return distance(p, a + t * ab);
}

// Sites involved in configurations the clipped tessellation cannot resolve
// robustly: coincident sites, (near-)cocircular quadruples inside the target,
// Voronoi vertices on a side line of the target, Voronoi edges through a
// corner.
inline std::vector<int> find_degeneracies(const Triangulation& tri, const std::vector<Vec2>& circ,
                                          const Rectangle& target, double tol) {
  std::vector<int> bad(tri.duplicates().begin(), tri.duplicates().end());
  const auto& tris = tri.triangles();
  Rectangle near = target.padded(tol);
  Rectangle inner = target.padded(-tol);
  const Vec2 corners[4] = {{target.x0, target.y0}, {target.x1, target.y0}, {target.x1, target.y1}, {target.x0, target.y1}};
  auto vertex_bad = [&](Vec2 v) { return near.contains(v) && target.distance_to_boundary(v) < tol; };
  for (std::size_t t = 0; t < tris.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      int u = tris[t].nb[k];
      if (u < static_cast<int>(t)) continue;  // each interior edge once
      int a = tris[t].v[(k + 1) % 3];
      int b = tris[t].v[(k + 2) % 3];
      if (!tri.is_site(a) || !tri.is_site(b)) continue;
      Vec2 p = circ[t], q = circ[static_cast<std::size_t>(u)];
      if (inner.contains(p) && inner.contains(q)) {
        if (distance(p, q) < tol) bad.push_back(std::max(a, b));
        continue;
      }
      if (!clip_segment(p, q, near)) continue;
      bool degenerate = distance(p, q) < tol || vertex_bad(p) || vertex_bad(q);
      for (const Vec2& c : corners) degenerate = degenerate || point_segment_distance(c, p, q) < tol;
      if (degenerate) bad.push_back(std::max(a, b));
    }
  }
  std::sort(bad.begin(), bad.end());
  bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
  return bad;
}

}  // namespace detail

/// Builds the Voronoi tessellation of `ps` clipped to `target`.
///
/// Degenerate configurations are repaired by jittering the offending sites
/// (radius 1e-6 unit lengths, deterministic in ps.seed) for up to eight
/// rounds; the graph keeps the repaired sites.
inline VoronoiGraph build_tessellation(const PointSet& ps, const Rectangle& target) {
  if (ps.points.empty()) throw std::invalid_argument("build_tessellation: empty point set");
  const std::size_t n = ps.points.size();
  const double unit = detail::unit_length(ps.region, n);
  const double tol = detail::kCoincidenceTol * unit;

  std::vector<Vec2> sites = ps.points;
  constexpr int kMaxRounds = 8;
  for (int round = 0;; ++round) {
    detail::Triangulation tri(sites, target, tol);
    const auto& tris = tri.triangles();
    const auto& pts = tri.points();
    std::vector<Vec2> circ(tris.size());
    for (std::size_t t = 0; t < tris.size(); ++t)
      circ[t] = detail::circumcenter(pts[tris[t].v[0]], pts[tris[t].v[1]], pts[tris[t].v[2]]);

    std::vector<int> bad = detail::find_degeneracies(tri, circ, target, tol);
    if (!bad.empty()) {
      if (round + 1 >= kMaxRounds)
        throw DegenerateInput("build_tessellation: degeneracy unresolved after " + std::to_string(kMaxRounds) +
                              " perturbation rounds");
      Rng rng = make_rng(derive_seed(ps.seed ^ 0x5eedde9e4e7a7eULL, static_cast<std::uint64_t>(round)));
      for (int i : bad) {
        double r = 1e-6 * unit * std::sqrt(uniform01(rng));
        double phi = 2.0 * M_PI * uniform01(rng);
        sites[i] = {sites[i].x + r * std::cos(phi), sites[i].y + r * std::sin(phi)};
      }
      continue;
    }

    VoronoiGraph g;
    g.target_ = target;
    g.perturbation_rounds_ = round;
    g.ring_off_.assign(n + 1, 0);
    g.side_mask_.assign(n, 0);
    g.area_.assign(n, 0.0);
    g.ring_pts_.reserve(7 * n);
    g.ring_lab_.reserve(7 * n);

    struct Piece {
      detail::ClippedSegment seg;
      CellId label;
    };
    std::vector<Piece> pieces;
    std::vector<int> around;
    std::vector<CellId> labels;
    for (std::size_t i = 0; i < n; ++i) {
      g.ring_off_[i] = g.ring_pts_.size();
      const int vi = static_cast<int>(i);
      // Triangles around site i, counterclockwise, and the neighbour across
      // the shared edge between consecutive ones.
      around.clear();
      labels.clear();
      int t0 = tri.incident_triangle(vi);
      int t = t0;
      do {
        int k = detail::Triangulation::index_in(tris[t], vi);
        around.push_back(t);
        labels.push_back(tris[t].v[(k + 2) % 3]);
        t = tris[t].nb[(k + 1) % 3];
      } while (t != t0);

      pieces.clear();
      const std::size_t m = around.size();
      for (std::size_t j = 0; j < m; ++j) {
        int ta = around[j], tb = around[(j + 1) % m];
        // Clip in a canonical direction so both cells sharing the edge get
        // identical coordinates.
        bool flip = ta > tb;
        auto seg = flip ? detail::clip_segment(circ[tb], circ[ta], target) : detail::clip_segment(circ[ta], circ[tb], target);
        if (!seg) continue;
        if (flip) {
          std::swap(seg->a, seg->b);
          std::swap(seg->side_a, seg->side_b);
        }
        if (!tri.is_site(labels[j])) throw std::logic_error("build_tessellation: guard cell reaches the target");
        pieces.push_back({*seg, labels[j]});
      }

      auto emit = [&](Vec2 v, CellId label) {
        g.ring_pts_.push_back(v);
        g.ring_lab_.push_back(label);
      };
      // Counterclockwise along the target boundary from an exit point to the
      // next entry point, emitting the corners passed.
      auto walk_boundary = [&](Vec2 from, Side from_side, Vec2 to, Side to_side) {
        double remaining = target.perimeter_param(to, to_side) - target.perimeter_param(from, from_side);
        if (remaining <= 0.0) remaining += target.perimeter();
        emit(from, side_label(from_side));
        Side s = from_side;
        double to_corner = 0.0;
        switch (s) {
          case Side::Bottom: to_corner = target.x1 - from.x; break;
          case Side::Right: to_corner = target.y1 - from.y; break;
          case Side::Top: to_corner = from.x - target.x0; break;
          case Side::Left: to_corner = from.y - target.y0; break;
        }
        for (int guard = 0; guard < 5 && remaining > to_corner; ++guard) {
          remaining -= to_corner;
          Vec2 corner = target.end_corner(s);
          s = static_cast<Side>((static_cast<int>(s) + 1) % 4);
          emit(corner, side_label(s));
          to_corner = (s == Side::Bottom || s == Side::Top) ? target.width() : target.height();
        }
      };

      if (pieces.empty()) {
        // No Voronoi edge meets the target: the cell either contains it or misses it.
        Vec2 c = target.center();
        bool inside = true;
        for (std::size_t j = 0; j < m && inside; ++j) {
          Vec2 a = circ[around[j]], b = circ[around[(j + 1) % m]];
          inside = detail::orient2d(a, b, c) >= 0.0;
        }
        if (inside) {
          emit({target.x0, target.y0}, side_label(Side::Bottom));
          emit({target.x1, target.y0}, side_label(Side::Right));
          emit({target.x1, target.y1}, side_label(Side::Top));
          emit({target.x0, target.y1}, side_label(Side::Left));
        }
      } else {
        for (std::size_t j = 0; j < pieces.size(); ++j) {
          const Piece& pc = pieces[j];
          const Piece& nx = pieces[(j + 1) % pieces.size()];
          emit(pc.seg.a, pc.label);
          if (pc.seg.side_b >= 0) {
            if (nx.seg.side_a < 0) throw std::logic_error("build_tessellation: clipped ring does not close");
            walk_boundary(pc.seg.b, static_cast<Side>(pc.seg.side_b), nx.seg.a, static_cast<Side>(nx.seg.side_a));
          }
        }
      }

      // Area, side incidence.
      auto verts = std::span<const Vec2>(g.ring_pts_.data() + g.ring_off_[i], g.ring_pts_.size() - g.ring_off_[i]);
      auto labs = std::span<const CellId>(g.ring_lab_.data() + g.ring_off_[i], g.ring_lab_.size() - g.ring_off_[i]);
      double area2 = 0.0;
      for (std::size_t k = 0; k < verts.size(); ++k) {
        area2 += cross(verts[k], verts[(k + 1) % verts.size()]);
        if (is_side_label(labs[k])) g.side_mask_[i] |= 1u << static_cast<int>(label_side(labs[k]));
      }
      g.area_[i] = 0.5 * area2;
    }
    g.ring_off_[n] = g.ring_pts_.size();

    // Neighbour lists in ring order.
    g.nbr_off_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      g.nbr_off_[i] = g.nbr_.size();
      for (std::size_t k = g.ring_off_[i]; k < g.ring_off_[i + 1]; ++k)
        if (g.ring_lab_[k] >= 0) g.nbr_.push_back(g.ring_lab_[k]);
    }
    g.nbr_off_[n] = g.nbr_.size();

    // Side lists ordered along each side.
    for (Side s : kAllSides) {
      const int si = static_cast<int>(s);
      std::vector<std::pair<double, CellId>> keyed;
      for (std::size_t i = 0; i < n; ++i) {
        if (!g.touches(static_cast<CellId>(i), s)) continue;
        int k = g.ring_index(static_cast<CellId>(i), side_label(s));
        Vec2 a = g.ring_pts_[g.ring_off_[i] + k];
        Vec2 b = g.ring_pts_[g.ring_off_[i] + (static_cast<std::size_t>(k) + 1) % (g.ring_off_[i + 1] - g.ring_off_[i])];
        bool horizontal = s == Side::Bottom || s == Side::Top;
        double key = horizontal ? 0.5 * (a.x + b.x) : 0.5 * (a.y + b.y);
        keyed.push_back({key, static_cast<CellId>(i)});
      }
      std::sort(keyed.begin(), keyed.end());
      g.side_rank_[si].assign(n, -1);
      for (std::size_t r = 0; r < keyed.size(); ++r) {
        g.side_cells_[si].push_back(keyed[r].second);
        g.side_rank_[si][keyed[r].second] = static_cast<int>(r);
      }
    }
    g.sites_ = std::move(sites);
    return g;
  }
}

/// The cells meeting side `s`, ordered along it.
inline std::vector<CellId> side_cells(const VoronoiGraph& g, Side s) {
  auto span = g.side_cells(s);
  return {span.begin(), span.end()};
}

/// Largest distance from `p` to a point of cell `c` (attained at a ring vertex).
inline double max_distance_in_cell(const VoronoiGraph& g, CellId c, Vec2 p) {
  double best = 0.0;
  for (Vec2 v : g.ring_vertices(c)) best = std::max(best, norm2(v - p));
  return std::sqrt(best);
}

/// Cells containing a point of the target at distance >= d from the site of `u`.
inline std::vector<CellId> arm_targets(const VoronoiGraph& g, CellId u, double d) {
  if (!g.valid(u)) throw std::out_of_range("arm_targets: invalid cell id");
  if (!(d > 0.0)) throw std::invalid_argument("arm_targets: d must be positive");
  std::vector<CellId> out;
  Vec2 s = g.site(u);
  for (std::size_t c = 0; c < g.size(); ++c)
    if (g.in_target(static_cast<CellId>(c)) && max_distance_in_cell(g, static_cast<CellId>(c), s) >= d)
      out.push_back(static_cast<CellId>(c));
  return out;
}

/// Whether `p` lies in the clipped polygon of `c` (closed).
inline bool cell_contains(const VoronoiGraph& g, CellId c, Vec2 p) {
  auto v = g.ring_vertices(c);
  if (v.empty()) return false;
  for (std::size_t k = 0; k < v.size(); ++k)
    if (detail::orient2d(v[k], v[(k + 1) % v.size()], p) < 0.0) return false;
  return true;
}

/// Cell whose clipped polygon contains `p`, or -1 when p is outside the target.
inline CellId locate_cell(const VoronoiGraph& g, Vec2 p) {
  if (!g.target().contains(p)) return -1;
  // The nearest site owns p; the polygon test only breaks ties on edges.
  CellId best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < g.size(); ++c) {
    double d = norm2(g.site(static_cast<CellId>(c)) - p);
    if (d < bd) {
      bd = d;
      best = static_cast<CellId>(c);
    }
  }
  return best;
}

}  // namespace vperc
