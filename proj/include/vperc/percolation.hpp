#pragma once

// Colourings of a tessellation and the crossing events built on them.

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vperc/geometry.hpp"
#include "vperc/rng.hpp"

namespace vperc {

/// +1 is red, -1 is blue. Index-aligned with the cells of a VoronoiGraph.
struct Coloring {
  std::vector<std::int8_t> signs;
  Seed seed = 0;

  std::size_t size() const { return signs.size(); }
  int operator[](std::size_t i) const { return signs[i]; }

  /// Bit i of `mask` set means cell i is red.
  static Coloring from_bits(std::size_t n, std::uint64_t mask) {
    Coloring w;
    w.signs.resize(n);
    for (std::size_t i = 0; i < n; ++i) w.signs[i] = ((mask >> i) & 1u) ? 1 : -1;
    return w;
  }
};

/// Refills `w` with fresh fair signs.
inline void fill_uniform(Coloring& w, Rng& rng) {
  std::size_t i = 0;
  while (i < w.signs.size()) {
    std::uint64_t bits = rng();
    for (int b = 0; b < 64 && i < w.signs.size(); ++b, ++i) w.signs[i] = ((bits >> b) & 1u) ? 1 : -1;
  }
}

inline Coloring random_coloring(std::size_t n, Seed seed) {
  Coloring w;
  w.signs.resize(n);
  w.seed = seed;
  Rng rng = make_rng(seed);
  fill_uniform(w, rng);
  return w;
}

inline Coloring reversed(const Coloring& w) {
  Coloring r = w;
  for (auto& s : r.signs) s = static_cast<std::int8_t>(-s);
  return r;
}

namespace detail {

inline void check_aligned(const VoronoiGraph& g, const Coloring& w, const char* who) {
  if (w.size() != g.size())
    throw std::invalid_argument(std::string(who) + ": coloring has " + std::to_string(w.size()) +
                                " entries for " + std::to_string(g.size()) + " cells");
}

/// Scratch buffers reused across evaluations on the same graph.
struct SearchScratch {
  std::vector<std::uint32_t> mark;
  std::uint32_t epoch = 0;
  std::vector<CellId> queue;

  void reset(std::size_t n) {
    if (mark.size() != n) {
      mark.assign(n, 0);
      epoch = 0;
    }
    if (++epoch == 0) {
      std::fill(mark.begin(), mark.end(), 0);
      epoch = 1;
    }
    queue.clear();
  }
};

}  // namespace detail

/// Whether cells of colour `sign` connect side `from` to side `to`.
inline bool monochromatic_crossing(const VoronoiGraph& g, std::span<const std::int8_t> signs, int sign, Side from,
                                   Side to, detail::SearchScratch& sc) {
  sc.reset(g.size());
  for (CellId c : g.side_cells(from)) {
    if (signs[c] != sign) continue;
    if (g.touches(c, to)) return true;
    sc.mark[c] = sc.epoch;
    sc.queue.push_back(c);
  }
  for (std::size_t h = 0; h < sc.queue.size(); ++h) {
    for (CellId d : g.neighbors(sc.queue[h])) {
      if (signs[d] != sign || sc.mark[d] == sc.epoch) continue;
      if (g.touches(d, to)) return true;
      sc.mark[d] = sc.epoch;
      sc.queue.push_back(d);
    }
  }
  return false;
}

inline bool red_horizontal_crossing(const VoronoiGraph& g, const Coloring& w) {
  detail::check_aligned(g, w, "red_horizontal_crossing");
  detail::SearchScratch sc;
  return monochromatic_crossing(g, w.signs, 1, Side::Left, Side::Right, sc);
}

inline bool blue_vertical_crossing(const VoronoiGraph& g, const Coloring& w) {
  detail::check_aligned(g, w, "blue_vertical_crossing");
  detail::SearchScratch sc;
  return monochromatic_crossing(g, w.signs, -1, Side::Bottom, Side::Top, sc);
}

/// Exactly one of a red left-right and a blue bottom-top crossing exists.
inline bool duality_holds(const VoronoiGraph& g, const Coloring& w) {
  return red_horizontal_crossing(g, w) != blue_vertical_crossing(g, w);
}

struct CrossingCounts {
  int X = 0;
  int Xplus = 0;
  int Xminus = 0;
};

namespace detail {

/// Vertex-disjoint bottom-to-top paths by shortest augmenting paths on the
/// split graph (each cell an in/out pair joined by a unit arc). The residual
/// graph is never materialised: a unit flow is stored as pred/succ per cell.
class SplitFlow {
 public:
  static constexpr CellId kNone = -1, kSource = -2, kSink = -3;

  int max_flow(const VoronoiGraph& g, std::span<const std::int8_t> signs, int sign) {
    const std::size_t n = g.size();
    pred_.assign(n, kNone);
    succ_.assign(n, kNone);
    int flow = 0;
    while (augment(g, signs, sign)) ++flow;
    return flow;
  }

  std::span<const CellId> succ() const { return succ_; }
  std::span<const CellId> pred() const { return pred_; }

 private:
  // State 2c is in(c), 2c+1 is out(c).
  bool augment(const VoronoiGraph& g, std::span<const std::int8_t> signs, int sign) {
    const std::size_t n = g.size();
    if (from_.size() != 2 * n) from_.resize(2 * n);
    if (seen_.size() != 2 * n) {
      seen_.assign(2 * n, 0);
      epoch_ = 0;
    }
    if (++epoch_ == 0) {
      std::fill(seen_.begin(), seen_.end(), 0);
      epoch_ = 1;
    }
    queue_.clear();
    auto push = [&](int state, int parent) {
      if (seen_[state] == epoch_) return;
      seen_[state] = epoch_;
      from_[state] = parent;
      queue_.push_back(state);
    };
    for (CellId c : g.side_cells(Side::Bottom))
      if (signs[c] == sign && pred_[c] != kSource) push(2 * c, -1);
    int last = -1;
    for (std::size_t h = 0; h < queue_.size() && last < 0; ++h) {
      const int st = queue_[h];
      const CellId c = st >> 1;
      if ((st & 1) == 0) {
        if (pred_[c] == kNone) push(2 * c + 1, st);
        else if (pred_[c] >= 0) push(2 * pred_[c] + 1, st);
        continue;
      }
      if (g.touches(c, Side::Top) && succ_[c] != kSink) {
        last = st;
        break;
      }
      for (CellId d : g.neighbors(c))
        if (signs[d] == sign && succ_[c] != d) push(2 * d, st);
      if (pred_[c] != kNone) push(2 * c, st);
    }
    if (last < 0) return false;

    path_.clear();
    for (int st = last; st >= 0; st = from_[st]) path_.push_back(st);
    std::reverse(path_.begin(), path_.end());
    pred_[path_.front() >> 1] = kSource;
    for (std::size_t k = 0; k + 1 < path_.size(); ++k) {
      const int a = path_[k], b = path_[k + 1];
      const CellId ca = a >> 1, cb = b >> 1;
      if ((a & 1) && !(b & 1) && ca != cb) {
        succ_[ca] = cb;
        pred_[cb] = ca;
      } else if (!(a & 1) && (b & 1) && ca != cb) {
        // Cancels the flow cb -> ca.
        if (succ_[cb] == ca) succ_[cb] = kNone;
        if (pred_[ca] == cb) pred_[ca] = kNone;
      }
    }
    succ_[last >> 1] = kSink;
    return true;
  }

  std::vector<CellId> pred_, succ_;
  std::vector<int> from_, queue_, path_;
  std::vector<std::uint32_t> seen_;
  std::uint32_t epoch_ = 0;
};

}  // namespace detail

/// Maximum numbers of cell-disjoint red and blue bottom-to-top crossings.
inline CrossingCounts max_disjoint_vertical_crossings(const VoronoiGraph& g, const Coloring& w) {
  detail::check_aligned(g, w, "max_disjoint_vertical_crossings");
  detail::SplitFlow flow;
  CrossingCounts out;
  out.Xplus = flow.max_flow(g, w.signs, 1);
  out.Xminus = flow.max_flow(g, w.signs, -1);
  out.X = out.Xplus + out.Xminus;
  return out;
}

struct CrossingFamily {
  std::vector<std::vector<CellId>> paths;
  std::vector<int> signs;

  std::size_t size() const { return paths.size(); }
};

/// Left-to-right sweep of bottom cells. From each start cell a left-first
/// depth-first search through same-coloured, not yet entered cells either
/// reaches the top (the DFS stack is the next crossing) or exhausts the
/// start cell's component. The next start is the leftmost bottom cell to the
/// right of every bottom cell entered so far.
inline CrossingFamily leftmost_crossing_family(const VoronoiGraph& g, const Coloring& w) {
  detail::check_aligned(g, w, "leftmost_crossing_family");
  CrossingFamily fam;
  const std::size_t n = g.size();
  std::vector<char> entered(n, 0);
  auto bottom = g.side_cells(Side::Bottom);
  int frontier = -1;  // largest bottom rank entered so far

  struct Frame {
    CellId cell;
    int next;  // ring index to try next
    int left;  // ring edges still to try
  };
  std::vector<Frame> stack;

  auto enter = [&](CellId c) {
    entered[c] = 1;
    frontier = std::max(frontier, g.side_rank(c, Side::Bottom));
  };

  for (int r = 0; r < static_cast<int>(bottom.size()); ++r) {
    if (r <= frontier) continue;
    const CellId s = bottom[r];
    const int sign = w[s];
    enter(s);
    if (g.touches(s, Side::Top)) {
      fam.paths.push_back({s});
      fam.signs.push_back(sign);
      continue;
    }
    auto open_frame = [&](CellId c, int from) {
      int m = static_cast<int>(g.ring_labels(c).size());
      stack.push_back({c, (from - 1 + m) % m, m - 1});
    };
    stack.clear();
    open_frame(s, g.ring_index(s, side_label(Side::Bottom)));
    bool found = false;
    while (!stack.empty() && !found) {
      Frame& f = stack.back();
      if (f.left == 0) {
        stack.pop_back();
        continue;
      }
      auto labs = g.ring_labels(f.cell);
      const int m = static_cast<int>(labs.size());
      CellId d = labs[f.next];
      f.next = (f.next - 1 + m) % m;
      --f.left;
      if (d < 0 || entered[d] || w[d] != sign) continue;
      enter(d);
      CellId parent = f.cell;
      open_frame(d, g.ring_index(d, parent));
      if (g.touches(d, Side::Top)) found = true;
    }
    if (found) {
      std::vector<CellId> path;
      path.reserve(stack.size());
      for (const Frame& f : stack) path.push_back(f.cell);
      fam.paths.push_back(std::move(path));
      fam.signs.push_back(sign);
    }
  }
  return fam;
}

/// Whether the monochromatic cluster of `u` reaches a cell containing a point
/// of the target at distance >= d from the site of u.
inline bool monochromatic_arm(const VoronoiGraph& g, const Coloring& w, CellId u, double d) {
  detail::check_aligned(g, w, "monochromatic_arm");
  if (!g.valid(u)) throw std::out_of_range("monochromatic_arm: invalid cell id");
  if (!(d > 0.0)) throw std::invalid_argument("monochromatic_arm: d must be positive");
  if (!g.in_target(u)) return false;
  const Vec2 s = g.site(u);
  std::vector<char> seen(g.size(), 0);
  std::vector<CellId> queue{u};
  seen[u] = 1;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    CellId c = queue[h];
    if (max_distance_in_cell(g, c, s) >= d) return true;
    for (CellId e : g.neighbors(c))
      if (!seen[e] && w[e] == w[u]) {
        seen[e] = 1;
        queue.push_back(e);
      }
  }
  return false;
}

}  // namespace vperc
