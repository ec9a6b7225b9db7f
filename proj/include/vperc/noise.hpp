#pragma once

// Resampling noise on colourings and the quenched correlation of the
// crossing event with its noisy copy.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "vperc/geometry.hpp"
#include "vperc/parallel.hpp"
#include "vperc/percolation.hpp"
#include "vperc/stats.hpp"

namespace vperc {

struct NoiseParams {
  double epsilon = 0.0;
  double exponent = 0.0;  // > 0 selects eps = n^-exponent

  double eps_for(std::size_t n) const {
    if (exponent > 0.0) return std::pow(static_cast<double>(n), -exponent);
    return epsilon;
  }
};

namespace detail {

inline void check_eps(double eps, const char* who) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument(std::string(who) + ": eps must lie in [0, 1]");
}

// Each sign is redrawn with probability eps, so it changes with probability eps/2.
inline void resample_into(const Coloring& w, Coloring& out, double eps, Rng& rng) {
  out.signs.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (uniform01(rng) < eps) out.signs[i] = (rng() >> 63) ? 1 : -1;
    else out.signs[i] = w.signs[i];
  }
}

}  // namespace detail

inline Coloring resample(const Coloring& w, double eps, Seed seed) {
  detail::check_eps(eps, "resample");
  Rng rng = make_rng(seed);
  Coloring out;
  out.seed = seed;
  detail::resample_into(w, out, eps, rng);
  return out;
}

/// Sample covariance of f(w) and f(w^eps) over paired draws. The stderr is
/// the delta-method one, from the per-pair terms (f - mean f)(f' - mean f'),
/// plus the second-order term of the product of the two mean errors, which
/// dominates when q is near 1/2 and eps is near 0.
inline EstimateReport noise_covariance(const VoronoiGraph& g, double eps, std::size_t reps, Seed seed,
                                       unsigned workers = 1) {
  detail::check_eps(eps, "noise_covariance");
  if (reps < 2) throw std::invalid_argument("noise_covariance: reps must be at least 2");
  std::vector<double> a(reps), b(reps);
  parallel_for(reps, workers, [&](std::size_t i) {
    Rng rng = make_rng(derive_seed(seed, i));
    Coloring w, v;
    w.signs.resize(g.size());
    fill_uniform(w, rng);
    detail::resample_into(w, v, eps, rng);
    detail::SearchScratch sc;
    a[i] = monochromatic_crossing(g, w.signs, 1, Side::Left, Side::Right, sc);
    b[i] = monochromatic_crossing(g, v.signs, 1, Side::Left, Side::Right, sc);
  });
  const double N = static_cast<double>(reps);
  double ma = mean_of(a), mb = mean_of(b);
  std::vector<double> psi(reps);
  for (std::size_t i = 0; i < reps; ++i) psi[i] = (a[i] - ma) * (b[i] - mb);
  EstimateReport r;
  r.value = mean_of(psi) * N / (N - 1.0);
  const double second = (variance_of(a) * variance_of(b) + r.value * r.value) / (N * N);
  r.std_error = std::sqrt(stderr_of(psi) * stderr_of(psi) + second);
  r.reps = reps;
  r.seed = seed;
  return r;
}

}  // namespace vperc
