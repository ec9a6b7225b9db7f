#pragma once

// Exact enumeration over all colourings of small tessellations, and Monte
// Carlo estimators for the same quantities on large ones.

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "vperc/geometry.hpp"
#include "vperc/parallel.hpp"
#include "vperc/percolation.hpp"
#include "vperc/stats.hpp"

namespace vperc {

/// num / 2^exp, kept in lowest terms so equality is structural.
struct Dyadic {
  std::uint64_t num = 0;
  int exp = 0;

  static Dyadic of(std::uint64_t num, int exp) {
    while (exp > 0 && num % 2 == 0) {
      num /= 2;
      --exp;
    }
    if (num == 0) exp = 0;
    return {num, exp};
  }
  double value() const { return std::ldexp(static_cast<double>(num), -exp); }
  friend bool operator==(const Dyadic&, const Dyadic&) = default;
};

inline constexpr std::size_t kEnumerationCap = 20;
inline constexpr std::size_t kSwitchingCap = 16;

namespace detail {

inline void check_cap(const VoronoiGraph& g, std::size_t cap, const char* who) {
  if (g.size() > cap)
    throw std::invalid_argument(std::string(who) + ": " + std::to_string(g.size()) + " cells exceeds the cap of " +
                                std::to_string(cap));
}

/// Adjacency as bitmasks, for enumeration. Bit i of a colouring mask is red.
struct BitGraph {
  int n = 0;
  std::vector<std::uint32_t> nb;
  std::uint32_t side[4] = {0, 0, 0, 0};

  explicit BitGraph(const VoronoiGraph& g) : n(static_cast<int>(g.size())), nb(g.size(), 0) {
    for (CellId c = 0; c < n; ++c) {
      for (CellId d : g.neighbors(c)) nb[c] |= 1u << d;
      for (Side s : kAllSides)
        if (g.touches(c, s)) side[static_cast<int>(s)] |= 1u << c;
    }
  }

  bool connects(std::uint32_t cells, Side from, Side to) const {
    std::uint32_t reach = cells & side[static_cast<int>(from)];
    std::uint32_t frontier = reach;
    while (frontier) {
      std::uint32_t next = 0;
      for (std::uint32_t f = frontier; f; f &= f - 1) next |= nb[std::countr_zero(f)];
      next &= cells & ~reach;
      reach |= next;
      frontier = next;
    }
    return reach & side[static_cast<int>(to)];
  }

  std::uint32_t all() const { return n == 32 ? ~0u : (1u << n) - 1; }
  bool red_horizontal(std::uint32_t red) const { return connects(red, Side::Left, Side::Right); }
  bool blue_vertical(std::uint32_t red) const { return connects(all() & ~red, Side::Bottom, Side::Top); }
};

/// f(mask) for every colouring.
inline std::vector<char> truth_table(const BitGraph& bg) {
  std::vector<char> f(std::size_t{1} << bg.n);
  for (std::uint32_t m = 0; m < f.size(); ++m) f[m] = bg.red_horizontal(m);
  return f;
}

}  // namespace detail

/// P(red horizontal crossing | tessellation) by enumerating all colourings.
inline Dyadic exact_quenched_crossing(const VoronoiGraph& g) {
  detail::check_cap(g, kEnumerationCap, "exact_quenched_crossing");
  detail::BitGraph bg(g);
  std::uint64_t hits = 0;
  for (std::uint32_t m = 0; m < (1u << bg.n); ++m) hits += bg.red_horizontal(m);
  return Dyadic::of(hits, bg.n);
}

/// E[2^-X | tessellation] by enumeration, X from max-flow.
inline Dyadic exact_two_pow_negX(const VoronoiGraph& g) {
  detail::check_cap(g, kEnumerationCap, "exact_two_pow_negX");
  const std::size_t n = g.size();
  detail::SplitFlow flow;
  Coloring w;
  std::uint64_t total = 0;  // sum of 2^(n - X), X <= n
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    w = Coloring::from_bits(n, m);
    int X = flow.max_flow(g, w.signs, 1) + flow.max_flow(g, w.signs, -1);
    total += std::uint64_t{1} << (n - static_cast<std::size_t>(X));
  }
  return Dyadic::of(total, static_cast<int>(2 * n));
}

/// Number of colourings for which the red left-right / blue bottom-top
/// duality fails (zero in general position).
inline std::uint64_t exhaustive_duality_violations(const VoronoiGraph& g) {
  detail::check_cap(g, kEnumerationCap, "exhaustive_duality_violations");
  detail::BitGraph bg(g);
  std::uint64_t bad = 0;
  for (std::uint32_t m = 0; m < (1u << bg.n); ++m) bad += bg.red_horizontal(m) == bg.blue_vertical(m);
  return bad;
}

inline EstimateReport mc_quenched_crossing(const VoronoiGraph& g, std::size_t reps, Seed seed, unsigned workers = 1) {
  if (reps == 0) throw std::invalid_argument("mc_quenched_crossing: reps must be positive");
  std::vector<double> hit(reps);
  parallel_for(reps, workers, [&](std::size_t i) {
    Coloring w = random_coloring(g.size(), derive_seed(seed, i));
    hit[i] = red_horizontal_crossing(g, w) ? 1.0 : 0.0;
  });
  return summarize(hit, seed);
}

struct InfluenceVector {
  std::vector<double> values;
  std::vector<double> std_error;  // zero when exact
  bool exact = false;

  std::size_t size() const { return values.size(); }
};

inline InfluenceVector exact_influences(const VoronoiGraph& g) {
  detail::check_cap(g, kEnumerationCap, "exact_influences");
  detail::BitGraph bg(g);
  auto f = detail::truth_table(bg);
  InfluenceVector v;
  v.exact = true;
  v.values.assign(g.size(), 0.0);
  v.std_error.assign(g.size(), 0.0);
  for (int c = 0; c < bg.n; ++c) {
    std::uint64_t piv = 0;
    for (std::uint32_t m = 0; m < f.size(); ++m) piv += f[m] != f[m ^ (1u << c)];
    v.values[c] = Dyadic::of(piv, bg.n).value();
  }
  return v;
}

/// Pivotality frequencies: each sampled colouring is evaluated with cell m
/// forced red and forced blue.
inline InfluenceVector mc_influences(const VoronoiGraph& g, std::size_t reps, Seed seed, unsigned workers = 1) {
  if (reps == 0) throw std::invalid_argument("mc_influences: reps must be positive");
  const std::size_t n = g.size();
  std::vector<std::vector<char>> piv(reps);
  parallel_for(reps, workers, [&](std::size_t i) {
    Coloring w = random_coloring(n, derive_seed(seed, i));
    detail::SearchScratch sc;
    auto& row = piv[i];
    row.assign(n, 0);
    for (std::size_t c = 0; c < n; ++c) {
      std::int8_t keep = w.signs[c];
      w.signs[c] = 1;
      bool up = monochromatic_crossing(g, w.signs, 1, Side::Left, Side::Right, sc);
      w.signs[c] = -1;
      bool down = monochromatic_crossing(g, w.signs, 1, Side::Left, Side::Right, sc);
      w.signs[c] = keep;
      row[c] = up != down;
    }
  });
  InfluenceVector v;
  v.values.assign(n, 0.0);
  v.std_error.assign(n, 0.0);
  for (const auto& row : piv)
    for (std::size_t c = 0; c < n; ++c) v.values[c] += row[c];
  for (std::size_t c = 0; c < n; ++c) {
    double p = v.values[c] / static_cast<double>(reps);
    v.values[c] = p;
    v.std_error[c] = reps > 1 ? std::sqrt(p * (1.0 - p) / static_cast<double>(reps - 1)) : 0.0;
  }
  return v;
}

inline double sum_squared_influences(const InfluenceVector& v) {
  double s = 0.0;
  for (double x : v.values) s += x * x;
  return s;
}

struct EfronSteinReport {
  double variance = 0.0;  // of q over point sets
  double variance_stderr = 0.0;
  double bound = 0.0;  // mean over point sets of the sum of squared influences
  double bound_stderr = 0.0;
  std::size_t n = 0;
  std::size_t eta_reps = 0;
  Seed seed = 0;
  std::uint64_t duality_violations = 0;
  std::vector<double> q, sum_inf2;  // per point set

  double combined_stderr() const { return std::hypot(variance_stderr, bound_stderr); }
};

namespace detail {

inline VoronoiGraph sample_tessellation(std::size_t n, const Rectangle& rect, const RegionMode& mode, Seed seed) {
  return build_tessellation(sample_binomial(n, rect, mode, seed), rect);
}

}  // namespace detail

/// Variance over point sets of the quenched crossing probability against
/// the mean sum of squared influences, both computed exactly per point set.
inline EfronSteinReport efron_stein_experiment(std::size_t n, const Rectangle& rect, std::size_t etaReps, Seed seed,
                                               const RegionMode& mode = RegionMode::plane(), unsigned workers = 1) {
  if (n > kEnumerationCap) throw std::invalid_argument("efron_stein_experiment: n exceeds the enumeration cap");
  if (etaReps < 2) throw std::invalid_argument("efron_stein_experiment: etaReps must be at least 2");
  std::vector<double> q(etaReps), ssi(etaReps);
  std::vector<std::uint64_t> bad(etaReps, 0);
  parallel_for(etaReps, workers, [&](std::size_t i) {
    VoronoiGraph g = detail::sample_tessellation(n, rect, mode, derive_seed(seed, i));
    q[i] = exact_quenched_crossing(g).value();
    ssi[i] = sum_squared_influences(exact_influences(g));
    bad[i] = exhaustive_duality_violations(g);
  });
  EfronSteinReport r;
  r.variance = variance_of(q);
  r.variance_stderr = variance_stderr(q);
  r.bound = mean_of(ssi);
  r.bound_stderr = stderr_of(ssi);
  r.n = n;
  r.eta_reps = etaReps;
  r.seed = seed;
  for (auto b : bad) r.duality_violations += b;
  r.q = std::move(q);
  r.sum_inf2 = std::move(ssi);
  return r;
}

struct ColourSwitchReport {
  /// For each k, the law of the sign sequence given X = k, as exact counts.
  std::map<int, std::map<std::vector<int>, std::uint64_t>> counts;
  std::map<int, std::uint64_t> totals;
  double max_deviation = 0.0;

  double probability(int k, const std::vector<int>& sigma) const {
    auto it = counts.find(k);
    if (it == counts.end()) return 0.0;
    auto jt = it->second.find(sigma);
    return jt == it->second.end() ? 0.0 : static_cast<double>(jt->second) / static_cast<double>(totals.at(k));
  }
};

/// Exact law of the sign sequence of the leftmost crossing family given X,
/// over all colourings.
inline ColourSwitchReport colour_switching_check(const VoronoiGraph& g) {
  detail::check_cap(g, kSwitchingCap, "colour_switching_check");
  const std::size_t n = g.size();
  ColourSwitchReport r;
  detail::SplitFlow flow;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    Coloring w = Coloring::from_bits(n, m);
    int X = flow.max_flow(g, w.signs, 1) + flow.max_flow(g, w.signs, -1);
    CrossingFamily fam = leftmost_crossing_family(g, w);
    if (static_cast<int>(fam.size()) != X) throw std::logic_error("colour_switching_check: family size differs from X");
    ++r.counts[X][fam.signs];
    ++r.totals[X];
  }
  // |count / N_k - 2^-k| is zero iff count * 2^k == N_k; patterns never seen count too.
  for (const auto& [k, law] : r.counts) {
    const std::uint64_t Nk = r.totals[k];
    const double target = std::ldexp(1.0, -k);
    if (law.size() < (std::size_t{1} << k)) r.max_deviation = std::max(r.max_deviation, target);
    for (const auto& [sigma, c] : law) {
      std::uint64_t scaled = c << k;
      if (scaled != Nk) {
        double dev = std::abs(static_cast<double>(c) / static_cast<double>(Nk) - target);
        r.max_deviation = std::max(r.max_deviation, dev > 0.0 ? dev : std::ldexp(1.0, -60));
      }
    }
  }
  return r;
}

struct MartingaleReport {
  double lhs = 0.0;  // Var(q)
  double lhs_stderr = 0.0;
  double rhs = 0.0;  // sum over m of E[(q_m - q_{m-1})^2]
  double rhs_stderr = 0.0;
  double diff_stderr = 0.0;  // of lhs - rhs, from per-point-set differences
  std::size_t n = 0;
  std::size_t eta_reps = 0;
  std::size_t suffix_reps = 0;
  Seed seed = 0;
  std::vector<double> q, increments;  // per point set
};

/// Nested estimate of the martingale increments of q along the filtration
/// revealing sites one by one. q_m is the mean of exact q over resampled
/// suffixes; the resampling noise of each q_m is removed from the squared
/// increments using its own sample variance, so both sides are unbiased.
inline MartingaleReport martingale_decomposition_check(std::size_t n, const Rectangle& rect, std::size_t etaReps,
                                                       Seed seed, std::size_t suffixReps = 200,
                                                       const RegionMode& mode = RegionMode::plane(),
                                                       unsigned workers = 1) {
  if (n == 0 || n > 12) throw std::invalid_argument("martingale_decomposition_check: n must be in 1..12");
  if (etaReps < 2 || suffixReps < 2) throw std::invalid_argument("martingale_decomposition_check: reps must be >= 2");
  std::vector<double> q(etaReps), inc(etaReps);
  parallel_for(etaReps, workers, [&](std::size_t i) {
    Seed si = derive_seed(seed, i);
    PointSet eta = sample_binomial(n, rect, mode, si);
    q[i] = exact_quenched_crossing(build_tessellation(eta, rect)).value();
    std::vector<double> qm(n + 1), vm(n + 1, 0.0);
    qm[n] = q[i];
    std::vector<double> draws(suffixReps);
    for (std::size_t m = 0; m < n; ++m) {
      for (std::size_t j = 0; j < suffixReps; ++j) {
        Seed sj = derive_seed(si, (m + 1) * 1000003 + j);
        PointSet fresh = sample_binomial(n, rect, mode, sj);
        for (std::size_t k = 0; k < m; ++k) fresh.points[k] = eta.points[k];
        draws[j] = exact_quenched_crossing(build_tessellation(fresh, rect)).value();
      }
      qm[m] = mean_of(draws);
      vm[m] = variance_of(draws) / static_cast<double>(suffixReps);
    }
    double s = 0.0;
    for (std::size_t m = 1; m <= n; ++m) s += (qm[m] - qm[m - 1]) * (qm[m] - qm[m - 1]) - vm[m] - vm[m - 1];
    inc[i] = s;
  });
  MartingaleReport r;
  r.lhs = variance_of(q);
  r.lhs_stderr = variance_stderr(q);
  r.rhs = mean_of(inc);
  r.rhs_stderr = stderr_of(inc);
  // Per-point-set contribution to lhs - rhs, (N/(N-1)) (q_i - mean)^2 - inc_i.
  const double N = static_cast<double>(etaReps), qbar = mean_of(q);
  std::vector<double> z(etaReps);
  for (std::size_t i = 0; i < etaReps; ++i) z[i] = N / (N - 1.0) * (q[i] - qbar) * (q[i] - qbar) - inc[i];
  r.diff_stderr = stderr_of(z);
  r.n = n;
  r.eta_reps = etaReps;
  r.suffix_reps = suffixReps;
  r.seed = seed;
  r.q = std::move(q);
  r.increments = std::move(inc);
  return r;
}

}  // namespace vperc
