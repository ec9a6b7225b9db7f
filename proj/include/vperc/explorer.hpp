#pragma once

// Randomised interface exploration deciding the red left-right crossing,
// and the revealment of that algorithm.
//
// The walk runs on the faces of the clipped tessellation. Outside the target
// the four sides act as virtual faces, and the left side is cut at the start
// point x into a part above and a part below it. The state is a real cell F,
// an edge index k of its ring and an orientation:
//   forward:  F is on the left, label(F,k) on the right, the walk heads for
//             vertex k+1 where the third face is label(F,k+1);
//   backward: F is on the right, label(F,k) on the left, the walk heads for
//             vertex k where the third face is label(F,k-1).
// At each vertex the third face is queried; the walk turns so that it stays
// between a face of the left colour and one of the right colour.

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "vperc/geometry.hpp"
#include "vperc/parallel.hpp"
#include "vperc/percolation.hpp"
#include "vperc/rng.hpp"

namespace vperc {

enum class Phase { Step2a, Step2b, Step3a, Step3b };

inline const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Step2a: return "2a";
    case Phase::Step2b: return "2b";
    case Phase::Step3a: return "3a";
    case Phase::Step3b: return "3b";
  }
  return "?";
}

struct TraceStep {
  Vec2 vertex;
  CellId cell;  // face met at the vertex; negative for a side of the target
  int step;     // 2 or 3
};

struct InterfaceTrace {
  Vec2 start;
  bool decision = false;
  Phase phase = Phase::Step2a;
  std::vector<CellId> queried;  // in query order, each cell once
  std::vector<TraceStep> steps;
};

namespace detail {

inline constexpr CellId kFaceBottom = -1;
inline constexpr CellId kFaceRight = -2;
inline constexpr CellId kFaceTop = -3;
inline constexpr CellId kFaceAbove = -4;
inline constexpr CellId kFaceBelow = -5;

/// Rings of the tessellation with the left side split at x. The cell c0
/// whose left edge contains x gets x as an extra ring vertex.
class SplitRings {
 public:
  SplitRings(const VoronoiGraph& g, CellId c0, int kx, Vec2 x) : g_(g), c0_(c0), kx_(kx), x_(x) {}

  int size(CellId f) const {
    int m = static_cast<int>(g_.ring_labels(f).size());
    return f == c0_ ? m + 1 : m;
  }

  CellId label(CellId f, int k) const {
    const int m = size(f);
    k = ((k % m) + m) % m;
    if (f != c0_) return raw_label(f, k);
    if (k < kx_) return raw_label(f, k);
    if (k == kx_) return kFaceAbove;
    if (k == kx_ + 1) return kFaceBelow;
    return raw_label(f, k - 1);
  }

  Vec2 vertex(CellId f, int k) const {
    const int m = size(f);
    k = ((k % m) + m) % m;
    auto v = g_.ring_vertices(f);
    if (f != c0_ || k <= kx_) return v[k];
    if (k == kx_ + 1) return x_;
    return v[k - 1];
  }

  int index_of(CellId f, CellId lab) const {
    const int m = size(f);
    for (int k = 0; k < m; ++k)
      if (label(f, k) == lab) return k;
    throw std::logic_error("explorer: face is not adjacent to the current cell");
  }

 private:
  CellId raw_label(CellId f, int k) const {
    CellId lab = g_.ring_labels(f)[k];
    if (lab != side_label(Side::Left)) return lab;
    auto v = g_.ring_vertices(f);
    double mid = 0.5 * (v[k].y + v[(k + 1) % v.size()].y);
    return mid > x_.y ? kFaceAbove : kFaceBelow;
  }

  const VoronoiGraph& g_;
  CellId c0_;
  int kx_;
  Vec2 x_;
};

}  // namespace detail

/// Cell whose left-side edge contains height y, and that edge's ring index.
/// Returns {-1, -1} when y is not strictly inside a left edge.
inline std::pair<CellId, int> left_edge_at(const VoronoiGraph& g, double y) {
  for (CellId c : g.side_cells(Side::Left)) {
    int k = g.ring_index(c, side_label(Side::Left));
    auto v = g.ring_vertices(c);
    double top = v[k].y, bottom = v[(k + 1) % v.size()].y;
    if (y > bottom && y < top) return {c, k};
  }
  return {-1, -1};
}

/// Runs the exploration from the point of the left side at height `y`.
inline InterfaceTrace ss_run_from(const VoronoiGraph& g, const Coloring& w, double y) {
  detail::check_aligned(g, w, "ss_run");
  const Rectangle& R = g.target();
  auto [c0, kx] = left_edge_at(g, y);
  if (c0 < 0) {
    // On a vertex of the left side: nudge upward.
    y += 1e-12 * R.height();
    std::tie(c0, kx) = left_edge_at(g, y);
  }
  if (c0 < 0) throw std::invalid_argument("ss_run: start point is not on the left side");

  InterfaceTrace tr;
  tr.start = {R.x0, y};
  detail::SplitRings rings(g, c0, kx, tr.start);
  std::vector<char> asked(g.size(), 0);
  auto query = [&](CellId c) {
    if (!asked[c]) {
      asked[c] = 1;
      tr.queried.push_back(c);
    }
    return static_cast<int>(w[c]);
  };

  std::size_t ring_total = 0;
  for (std::size_t c = 0; c < g.size(); ++c) ring_total += g.ring_labels(static_cast<CellId>(c)).size();
  const std::size_t max_steps = ring_total + 16;

  // Colour of a virtual face in each step; 0 means the walk stops there.
  auto side_colour = [](int step, CellId f) {
    using namespace detail;
    if (step == 2) {
      if (f == kFaceAbove) return 1;
      if (f == kFaceBelow || f == kFaceBottom) return -1;
      return 0;
    }
    if (f == kFaceAbove || f == kFaceTop) return -1;
    if (f == kFaceBelow) return 1;
    return 0;
  };

  enum class End { Right, Top, Bottom };
  auto walk = [&](int step, bool& touched_bottom) -> End {
    const int left_colour = side_colour(step, detail::kFaceAbove);
    CellId F = c0;
    int k;
    bool fwd;
    if (query(c0) == left_colour) {
      k = kx + 1;
      fwd = true;
    } else {
      k = kx;
      fwd = false;
    }
    for (std::size_t guard = 0; guard < max_steps; ++guard) {
      const CellId other = rings.label(F, k);
      const CellId C = rings.label(F, fwd ? k + 1 : k - 1);
      tr.steps.push_back({rings.vertex(F, fwd ? k + 1 : k), C, step});
      const int cc = C >= 0 ? query(C) : side_colour(step, C);
      if (cc == 0) {
        if (C == detail::kFaceRight) return End::Right;
        return C == detail::kFaceTop ? End::Top : End::Bottom;
      }
      if (C == detail::kFaceBottom) touched_bottom = true;
      if (fwd) {
        // F left, `other` right.
        if (cc == left_colour) {
          if (C >= 0) {
            k = rings.index_of(C, F) + 1;
            F = C;
          } else {
            if (other < 0) throw std::logic_error("explorer: walk cornered between two sides");
            k = rings.index_of(other, C);
            F = other;
            fwd = false;
          }
        } else {
          k = k + 1;
        }
      } else {
        // `other` left, F right.
        if (cc == left_colour) {
          if (C >= 0) {
            k = rings.index_of(C, F);
            F = C;
            fwd = true;
          } else {
            k = k - 1;
          }
        } else {
          if (C >= 0) {
            k = rings.index_of(C, other);
            F = C;
          } else {
            if (other < 0) throw std::logic_error("explorer: walk cornered between two sides");
            k = rings.index_of(other, C);
            F = other;
            fwd = true;
          }
        }
      }
      k = ((k % rings.size(F)) + rings.size(F)) % rings.size(F);
    }
    throw std::logic_error("explorer: interface walk did not terminate");
  };

  bool touched_bottom = false;
  End e2 = walk(2, touched_bottom);
  if (e2 == End::Right) {
    tr.decision = true;
    tr.phase = Phase::Step2a;
    return tr;
  }
  if (e2 == End::Top && touched_bottom) {
    tr.decision = false;
    tr.phase = Phase::Step2b;
    return tr;
  }
  if (e2 != End::Top) throw std::logic_error("explorer: step 2 ended on an unexpected side");
  bool unused = false;
  End e3 = walk(3, unused);
  tr.decision = e3 == End::Right;
  tr.phase = tr.decision ? Phase::Step3a : Phase::Step3b;
  return tr;
}

/// Start height uniform on the middle third of the left side.
inline double ss_start_height(const Rectangle& R, Seed seed) {
  Rng rng = make_rng(seed);
  return R.y0 + R.height() / 3.0 + uniform01(rng) * R.height() / 3.0;
}

inline InterfaceTrace ss_run(const VoronoiGraph& g, const Coloring& w, Seed seed) {
  return ss_run_from(g, w, ss_start_height(g.target(), seed));
}

/// Debug dump: one row per vertex the walk passed.
inline void write_trace_csv(std::ostream& os, const InterfaceTrace& tr) {
  os.precision(17);
  os << "index,step,x,y,cell\n";
  os << 0 << ",2," << tr.start.x << ',' << tr.start.y << ",start\n";
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    const auto& s = tr.steps[i];
    os << i + 1 << ',' << s.step << ',' << s.vertex.x << ',' << s.vertex.y << ',';
    switch (s.cell) {
      case detail::kFaceBottom: os << "bottom"; break;
      case detail::kFaceRight: os << "right"; break;
      case detail::kFaceTop: os << "top"; break;
      case detail::kFaceAbove: os << "left-above"; break;
      case detail::kFaceBelow: os << "left-below"; break;
      default: os << s.cell;
    }
    os << '\n';
  }
}

struct RevealmentReport {
  std::vector<double> frequency;
  double delta = 0.0;
  double delta_stderr = 0.0;
  CellId argmax = -1;
  std::size_t reps = 0;
  Seed seed = 0;
  std::size_t wrong_decisions = 0;  // against the connectivity oracle
  std::size_t duality_violations = 0;
};

/// Query frequencies over independent colourings and start points.
inline RevealmentReport revealment(const VoronoiGraph& g, std::size_t reps, Seed seed, unsigned workers = 1) {
  if (reps == 0) throw std::invalid_argument("revealment: reps must be positive");
  std::vector<std::vector<CellId>> seen(reps);
  std::vector<char> wrong(reps, 0), dual(reps, 0);
  parallel_for(reps, workers, [&](std::size_t i) {
    Seed si = derive_seed(seed, i);
    Coloring w = random_coloring(g.size(), derive_seed(si, 0));
    InterfaceTrace tr = ss_run(g, w, derive_seed(si, 1));
    bool red = red_horizontal_crossing(g, w);
    wrong[i] = tr.decision != red;
    dual[i] = red == blue_vertical_crossing(g, w);
    seen[i] = std::move(tr.queried);
  });
  RevealmentReport r;
  r.frequency.assign(g.size(), 0.0);
  r.reps = reps;
  r.seed = seed;
  for (std::size_t i = 0; i < reps; ++i) {
    for (CellId c : seen[i]) r.frequency[c] += 1.0;
    r.wrong_decisions += wrong[i];
    r.duality_violations += dual[i];
  }
  for (std::size_t c = 0; c < g.size(); ++c) {
    r.frequency[c] /= static_cast<double>(reps);
    if (r.frequency[c] > r.delta) {
      r.delta = r.frequency[c];
      r.argmax = static_cast<CellId>(c);
    }
  }
  r.delta_stderr = std::sqrt(r.delta * (1.0 - r.delta) / static_cast<double>(reps));
  return r;
}

/// Queried cells whose site lies farther than r from both the start point and
/// the boundary of the target, yet whose monochromatic cluster stays within r
/// of the site. Near the boundary the virtual sides can stand in for the
/// cluster, so those sites are excluded.
inline std::vector<CellId> query_distance_violations(const VoronoiGraph& g, const Coloring& w,
                                                     const InterfaceTrace& tr, double r) {
  std::vector<CellId> bad;
  const Rectangle& R = g.target();
  for (CellId u : tr.queried) {
    Vec2 s = g.site(u);
    if (!R.contains(s) || R.distance_to_boundary(s) <= r || distance(s, tr.start) <= r) continue;
    if (!monochromatic_arm(g, w, u, r)) bad.push_back(u);
  }
  return bad;
}

}  // namespace vperc
