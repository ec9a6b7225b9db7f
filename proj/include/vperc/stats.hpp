#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "vperc/rng.hpp"

namespace vperc {

/// A Monte Carlo quantity with its provenance.
struct EstimateReport {
  double value = 0.0;
  double std_error = 0.0;  // "stderr" is a macro in <cstdio>
  std::size_t reps = 0;
  Seed seed = 0;
};

inline double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

/// Unbiased sample variance.
inline double variance_of(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  double m = mean_of(xs), s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

/// Standard error of the mean.
inline double stderr_of(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  return std::sqrt(variance_of(xs) / static_cast<double>(xs.size()));
}

/// Standard error of the unbiased sample variance, from the fourth central
/// moment: Var(s^2) ~ (m4 - (N-3)/(N-1) s^4) / N.
inline double variance_stderr(std::span<const double> xs) {
  const double N = static_cast<double>(xs.size());
  if (xs.size() < 4) return 0.0;
  double m = mean_of(xs), m4 = 0.0;
  for (double x : xs) m4 += std::pow(x - m, 4);
  m4 /= N;
  double s2 = variance_of(xs);
  double v = (m4 - (N - 3.0) / (N - 1.0) * s2 * s2) / N;
  return std::sqrt(std::max(v, 0.0));
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares of y on x.
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  LinearFit f;
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return f;
  double mx = mean_of(x.first(n)), my = mean_of(y.first(n));
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

inline EstimateReport summarize(std::span<const double> xs, Seed seed) {
  return {mean_of(xs), stderr_of(xs), xs.size(), seed};
}

}  // namespace vperc
