#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace vperc;
using namespace testing_support;

namespace {

// Exact Cov(f(w), f(w^eps)) by summing over all pairs of colourings; a
// coordinate survives the noise unchanged with probability 1 - eps/2.
double exact_covariance(const VoronoiGraph& g, double eps, int colour) {
  const std::size_t n = g.size();
  const std::uint64_t N = std::uint64_t{1} << n;
  std::vector<double> f(N);
  for (std::uint64_t m = 0; m < N; ++m) f[m] = oracle_crossing(g, signs_from_mask(n, m), colour, Side::Left, Side::Right);
  double joint = 0.0, mean = 0.0;
  for (std::uint64_t a = 0; a < N; ++a) {
    mean += f[a];
    if (f[a] == 0.0) continue;
    for (std::uint64_t b = 0; b < N; ++b) {
      if (f[b] == 0.0) continue;
      int diff = __builtin_popcountll(a ^ b);
      joint += std::pow(eps / 2, diff) * std::pow(1 - eps / 2, static_cast<double>(n) - diff);
    }
  }
  joint /= static_cast<double>(N);
  mean /= static_cast<double>(N);
  return joint - mean * mean;
}

}  // namespace

TEST(Resample, ZeroNoiseIsIdentity) {
  auto w = random_coloring(1000, 1);
  EXPECT_EQ(resample(w, 0.0, 2).signs, w.signs);
}

TEST(Resample, FullNoiseIsIndependent) {
  auto w = random_coloring(100000, 1);
  auto v = resample(w, 1.0, 2);
  double agree = 0;
  for (std::size_t i = 0; i < w.size(); ++i) agree += w[i] == v[i];
  EXPECT_NEAR(agree / 1e5, 0.5, 0.005);
}

TEST(Resample, DisagreementIsHalfTheRate) {
  auto w = random_coloring(100000, 3);
  auto v = resample(w, 0.3, 4);
  double diff = 0;
  for (std::size_t i = 0; i < w.size(); ++i) diff += w[i] != v[i];
  EXPECT_NEAR(diff / 1e5, 0.15, 0.004);
}

TEST(Resample, Validation) {
  auto w = random_coloring(10, 1);
  EXPECT_THROW(resample(w, -0.1, 1), std::invalid_argument);
  EXPECT_THROW(resample(w, 1.5, 1), std::invalid_argument);
  EXPECT_THROW(resample(w, std::nan(""), 1), std::invalid_argument);
  EXPECT_EQ(resample(w, 0.5, 9).signs, resample(w, 0.5, 9).signs);
}

TEST(NoiseParams, Schedule) {
  NoiseParams p{0.2, 0.0};
  EXPECT_EQ(p.eps_for(100), 0.2);
  NoiseParams q{0.0, 0.5};
  EXPECT_DOUBLE_EQ(q.eps_for(100), 0.1);
}

TEST(NoiseCovariance, SingleCellWithoutNoise) {
  auto r = noise_covariance(single_cell(), 0.0, 10000, 1);
  EXPECT_NEAR(r.value, 0.25, 3 * r.std_error + 1e-12);
  EXPECT_GT(r.std_error, 0.0);
}

TEST(NoiseCovariance, FullNoiseDecorrelates) {
  auto g = random_instance(200, 3);
  auto r = noise_covariance(g, 1.0, 20000, 2);
  EXPECT_LE(std::abs(r.value), 3 * r.std_error);
}

TEST(NoiseCovariance, Validation) {
  EXPECT_THROW(noise_covariance(single_cell(), 0.5, 1, 1), std::invalid_argument);
  EXPECT_THROW(noise_covariance(single_cell(), 2.0, 100, 1), std::invalid_argument);
}

TEST(NoiseCovariance, ZeroNoiseMatchesExactVariance) {
  for (int i = 0; i < 10; ++i) {
    auto g = random_unit_instance(4 + i, 40 + i);
    double q = exact_quenched_crossing(g).value();
    auto r = noise_covariance(g, 0.0, 20000, 70 + i);
    EXPECT_LE(std::abs(r.value - q * (1 - q)), 3 * r.std_error + 1e-12) << i;
  }
}

TEST(NoiseCovariance, MatchesPairEnumeration) {
  for (int i = 0; i < 8; ++i) {
    auto g = random_unit_instance(6 + i % 4, 90 + i);
    for (double eps : {0.1, 0.5}) {
      double exact = exact_covariance(g, eps, 1);
      auto r = noise_covariance(g, eps, 40000, 200 + i);
      EXPECT_LE(std::abs(r.value - exact), 4 * r.std_error + 1e-12) << i << " eps " << eps;
      // Palette reversal leaves the covariance unchanged.
      EXPECT_NEAR(exact_covariance(g, eps, -1), exact, 1e-12);
      EXPECT_GE(exact, -1e-15);
    }
  }
}

TEST(NoiseCovariance, NonnegativeWithinError) {
  for (int i = 0; i < 10; ++i) {
    auto g = random_instance(300, 10 + i);
    auto r = noise_covariance(g, 0.05 * (i + 1), 2000, 30 + i);
    EXPECT_GE(r.value, -3 * r.std_error);
  }
}

TEST(NoiseCovariance, IndependentOfWorkerCount) {
  auto g = random_instance(300, 4);
  auto a = noise_covariance(g, 0.2, 500, 6, 1), b = noise_covariance(g, 0.2, 500, 6, 4);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
}
