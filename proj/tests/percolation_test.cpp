#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "support.hpp"

using namespace vperc;
using namespace testing_support;

namespace {

Coloring col(std::vector<std::int8_t> s) {
  Coloring w;
  w.signs = std::move(s);
  return w;
}

bool adjacent(const VoronoiGraph& g, CellId a, CellId b) {
  auto nb = g.neighbors(a);
  return std::find(nb.begin(), nb.end(), b) != nb.end();
}

// Structural checks on a family that do not rely on the flow code.
void check_family(const VoronoiGraph& g, const Coloring& w, const CrossingFamily& fam) {
  ASSERT_EQ(fam.paths.size(), fam.signs.size());
  std::set<CellId> used;
  int last_rank = -1;
  for (std::size_t j = 0; j < fam.size(); ++j) {
    const auto& p = fam.paths[j];
    ASSERT_FALSE(p.empty());
    EXPECT_TRUE(g.touches(p.front(), Side::Bottom));
    EXPECT_TRUE(g.touches(p.back(), Side::Top));
    int rank = g.side_rank(p.front(), Side::Bottom);
    EXPECT_GT(rank, last_rank);
    last_rank = rank;
    for (std::size_t i = 0; i < p.size(); ++i) {
      EXPECT_EQ(w[p[i]], fam.signs[j]);
      EXPECT_TRUE(used.insert(p[i]).second) << "cell reused";
      if (i > 0) {
        EXPECT_TRUE(adjacent(g, p[i - 1], p[i]));
      }
    }
  }
}

}  // namespace

TEST(Coloring, RandomIsDeterministicAndBalanced) {
  auto a = random_coloring(10000, 3), b = random_coloring(10000, 3);
  EXPECT_EQ(a.signs, b.signs);
  int red = 0;
  for (auto s : a.signs) {
    ASSERT_TRUE(s == 1 || s == -1);
    red += s == 1;
  }
  EXPECT_NEAR(red / 1e4, 0.5, 0.02);
  EXPECT_EQ(Coloring::from_bits(3, 0b101).signs, (std::vector<std::int8_t>{1, -1, 1}));
}

TEST(RedHorizontalCrossing, SingleCell) {
  auto g = single_cell();
  EXPECT_TRUE(red_horizontal_crossing(g, col({1})));
  EXPECT_FALSE(red_horizontal_crossing(g, col({-1})));
}

TEST(RedHorizontalCrossing, VerticalHalves) {
  auto g = vertical_halves();
  EXPECT_TRUE(red_horizontal_crossing(g, col({1, 1})));
  EXPECT_FALSE(red_horizontal_crossing(g, col({1, -1})));
  EXPECT_FALSE(red_horizontal_crossing(g, col({-1, 1})));
  EXPECT_FALSE(red_horizontal_crossing(g, col({-1, -1})));
}

TEST(RedHorizontalCrossing, HorizontalHalves) {
  auto g = horizontal_halves();
  EXPECT_TRUE(red_horizontal_crossing(g, col({1, 1})));
  EXPECT_TRUE(red_horizontal_crossing(g, col({1, -1})));
  EXPECT_TRUE(red_horizontal_crossing(g, col({-1, 1})));
  EXPECT_FALSE(red_horizontal_crossing(g, col({-1, -1})));
}

TEST(Percolation, MisalignedColoringRejected) {
  auto g = vertical_halves();
  auto w = col({1});
  EXPECT_THROW(red_horizontal_crossing(g, w), std::invalid_argument);
  EXPECT_THROW(max_disjoint_vertical_crossings(g, w), std::invalid_argument);
  EXPECT_THROW(leftmost_crossing_family(g, w), std::invalid_argument);
  EXPECT_THROW(monochromatic_arm(g, w, 0, 0.1), std::invalid_argument);
}

TEST(DisjointCrossings, TwoCellExamples) {
  auto single = single_cell();
  auto x = max_disjoint_vertical_crossings(single, col({1}));
  EXPECT_EQ(x.X, 1);
  EXPECT_EQ(x.Xplus, 1);
  EXPECT_EQ(x.Xminus, 0);

  auto v = vertical_halves();
  for (std::uint64_t m = 0; m < 4; ++m) EXPECT_EQ(max_disjoint_vertical_crossings(v, Coloring::from_bits(2, m)).X, 2);

  auto h = horizontal_halves();
  EXPECT_EQ(max_disjoint_vertical_crossings(h, col({1, 1})).X, 1);
  EXPECT_EQ(max_disjoint_vertical_crossings(h, col({-1, -1})).X, 1);
  EXPECT_EQ(max_disjoint_vertical_crossings(h, col({1, -1})).X, 0);
  EXPECT_EQ(max_disjoint_vertical_crossings(h, col({-1, 1})).X, 0);
}

TEST(CrossingFamily, TwoCellExamples) {
  auto h = horizontal_halves();
  auto f = leftmost_crossing_family(h, col({1, 1}));
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f.signs, std::vector<int>{1});
  EXPECT_EQ(std::set<CellId>(f.paths[0].begin(), f.paths[0].end()), (std::set<CellId>{0, 1}));

  auto v = vertical_halves();
  auto g = leftmost_crossing_family(v, col({1, -1}));
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g.signs, (std::vector<int>{1, -1}));
  EXPECT_EQ(g.paths[0], std::vector<CellId>{0});
  EXPECT_EQ(g.paths[1], std::vector<CellId>{1});
}

TEST(CrossingFamily, MatchesBruteForceFlowOnSmallInstances) {
  for (int i = 0; i < 200; ++i) {
    std::size_t n = 1 + static_cast<std::size_t>(i % 40);
    auto g = random_unit_instance(n, 1000 + i);
    auto w = random_coloring(n, 5000 + i);
    auto s = signs_of(w);
    SCOPED_TRACE(i);
    auto x = max_disjoint_vertical_crossings(g, w);
    EXPECT_EQ(x.Xplus, oracle_disjoint_crossings(g, s, 1));
    EXPECT_EQ(x.Xminus, oracle_disjoint_crossings(g, s, -1));
    EXPECT_EQ(x.X, x.Xplus + x.Xminus);
    auto fam = leftmost_crossing_family(g, w);
    EXPECT_EQ(static_cast<int>(fam.size()), x.X);
    check_family(g, w, fam);
  }
}

TEST(CrossingFamily, MengerEqualityAtModerateSize) {
  for (int i = 0; i < 30; ++i) {
    auto g = random_instance(300 + 50 * i, 70 + i, RegionMode::plane(1.0));
    auto w = random_coloring(g.size(), 900 + i);
    auto x = max_disjoint_vertical_crossings(g, w);
    auto fam = leftmost_crossing_family(g, w);
    EXPECT_EQ(static_cast<int>(fam.size()), x.X);
    check_family(g, w, fam);
    // Flow count cross-checked against the matrix oracle only where it is cheap.
    if (g.size() <= 500) {
      EXPECT_EQ(x.Xplus, oracle_disjoint_crossings(g, signs_of(w), 1));
    }
  }
}

TEST(CrossingFamily, ExhaustiveOverSmallColourings) {
  for (int i = 0; i < 10; ++i) {
    auto g = random_unit_instance(10, 40 + i);
    for (std::uint64_t m = 0; m < (1u << 10); ++m) {
      auto w = Coloring::from_bits(10, m);
      auto fam = leftmost_crossing_family(g, w);
      ASSERT_EQ(static_cast<int>(fam.size()), max_disjoint_vertical_crossings(g, w).X);
    }
  }
}

TEST(Crossing, AgreesWithUnionFindOracleAndDuality) {
  for (int i = 0; i < 300; ++i) {
    std::size_t n = 1 + static_cast<std::size_t>(i % 60) * 5;
    auto g = random_instance(n, 2000 + i, i % 2 ? RegionMode::plane(1.0) : RegionMode::half_plane(1.0));
    auto w = random_coloring(g.size(), 7000 + i);
    auto s = signs_of(w);
    bool red = red_horizontal_crossing(g, w);
    bool blue = blue_vertical_crossing(g, w);
    EXPECT_EQ(red, oracle_crossing(g, s, 1, Side::Left, Side::Right));
    EXPECT_EQ(blue, oracle_crossing(g, s, -1, Side::Bottom, Side::Top));
    EXPECT_NE(red, blue);
    EXPECT_TRUE(duality_holds(g, w));
  }
}

TEST(Crossing, MonotoneInSingleFlips) {
  for (int i = 0; i < 40; ++i) {
    auto g = random_instance(60, 300 + i);
    auto w = random_coloring(g.size(), 400 + i);
    bool before = red_horizontal_crossing(g, w);
    for (std::size_t c = 0; c < g.size(); ++c) {
      if (w[c] != -1) continue;
      Coloring up = w;
      up.signs[c] = 1;
      if (before) {
        EXPECT_TRUE(red_horizontal_crossing(g, up));
      }
    }
  }
}

TEST(Crossing, ColourReversal) {
  for (int i = 0; i < 50; ++i) {
    auto g = random_instance(200, 500 + i);
    auto w = random_coloring(g.size(), 600 + i);
    auto r = reversed(w);
    auto a = max_disjoint_vertical_crossings(g, w), b = max_disjoint_vertical_crossings(g, r);
    EXPECT_EQ(a.Xplus, b.Xminus);
    EXPECT_EQ(a.Xminus, b.Xplus);
    // Red left-right for w is blue left-right for the reversal.
    EXPECT_EQ(red_horizontal_crossing(g, w), oracle_crossing(g, signs_of(r), -1, Side::Left, Side::Right));
  }
}

TEST(MonochromaticArm, Examples) {
  auto g = single_cell();
  // Farthest point of the unit square from its centre is at sqrt(1/2).
  EXPECT_TRUE(monochromatic_arm(g, col({1}), 0, 0.5));
  EXPECT_TRUE(monochromatic_arm(g, col({-1}), 0, 0.7));
  EXPECT_FALSE(monochromatic_arm(g, col({1}), 0, 0.71));
  EXPECT_THROW(monochromatic_arm(g, col({1}), 1, 0.5), std::out_of_range);
  EXPECT_THROW(monochromatic_arm(g, col({1}), 0, 0.0), std::invalid_argument);

  auto v = vertical_halves();
  EXPECT_TRUE(monochromatic_arm(v, col({1, 1}), 0, 0.8));   // reaches (1,0)
  EXPECT_FALSE(monochromatic_arm(v, col({1, -1}), 0, 0.8));  // stuck in its half
}

TEST(MonochromaticArm, AgreesWithTargetsAndClusters) {
  for (int i = 0; i < 20; ++i) {
    auto g = random_instance(400, 800 + i);
    auto w = random_coloring(g.size(), 850 + i);
    CellId u = locate_cell(g, g.target().center());
    for (double d : {1.0, 3.0, 8.0}) {
      auto targets = arm_targets(g, u, d);
      UnionFind uf(g.size());
      for (CellId c = 0; c < static_cast<CellId>(g.size()); ++c)
        for (CellId e : g.neighbors(c))
          if (w[c] == w[e]) uf.unite(c, e);
      bool want = false;
      for (CellId t : targets) want = want || uf.find(t) == uf.find(u);
      EXPECT_EQ(monochromatic_arm(g, w, u, d), want);
    }
  }
}

TEST(MonochromaticArm, ProbabilityDecreasesWithDistance) {
  const std::vector<double> ds{4, 8, 16, 32};
  std::vector<double> hits(ds.size(), 0.0);
  const int etas = 300, per = 5;
  for (int e = 0; e < etas; ++e) {
    auto g = random_instance(4096, 10000 + e, RegionMode::plane(4.0));
    CellId u = locate_cell(g, g.target().center());
    for (int j = 0; j < per; ++j) {
      auto w = random_coloring(g.size(), derive_seed(e, j));
      for (std::size_t k = 0; k < ds.size(); ++k) hits[k] += monochromatic_arm(g, w, u, ds[k]);
    }
  }
  const double N = etas * per;
  for (std::size_t k = 1; k < ds.size(); ++k) {
    double p0 = hits[k - 1] / N, p1 = hits[k] / N;
    double se = std::sqrt(p0 * (1 - p0) / N + p1 * (1 - p1) / N);
    EXPECT_LE(p1, p0 + 2 * se) << "d=" << ds[k];
  }
  EXPECT_GT(hits[0], hits[3]);
}
