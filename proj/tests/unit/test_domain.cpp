#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "l0prox/error.hpp"
#include "l0prox/grid.hpp"
#include "l0prox/grid_io.hpp"

using namespace l0prox;

namespace {

GridPtr unit_grid(std::size_t n) { return make_grid(Grid::weighted(std::vector<double>(n, 1.0))); }

}  // namespace

TEST(Grid, IntervalUsesInteriorNodes) {
  const Grid g = Grid::interval(1.0, 4);
  EXPECT_EQ(g.size(), 4u);
  EXPECT_DOUBLE_EQ(g.spacing()[0], 0.2);
  EXPECT_DOUBLE_EQ(g.coordinate(0)[0], 0.2);
  EXPECT_DOUBLE_EQ(g.coordinate(3)[0], 0.8);
  EXPECT_NEAR(g.total_measure(), 0.8, 1e-15);
  EXPECT_TRUE(g.uniform_weights());
}

TEST(Grid, RectangleOrderIsXFastest) {
  const Grid g = Grid::rectangle(1.0, 2.0, 3, 2);
  ASSERT_EQ(g.size(), 6u);
  EXPECT_DOUBLE_EQ(g.weight(0), 0.25 * (2.0 / 3.0));
  EXPECT_DOUBLE_EQ(g.coordinate(1)[0], 0.5);
  EXPECT_DOUBLE_EQ(g.coordinate(1)[1], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(g.coordinate(3)[1], 4.0 / 3.0);
}

TEST(Grid, TotalMeasureMatchesWeights) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> w(0.01, 3.0);
  std::vector<double> ws(257);
  for (double& x : ws) x = w(rng);
  const Grid g = Grid::weighted(ws);
  long double s = 0;
  for (double x : ws) s += x;
  EXPECT_NEAR(g.total_measure(), static_cast<double>(s), 1e-12 * g.total_measure());
  EXPECT_FALSE(g.uniform_weights());
}

TEST(Grid, RejectsBadInput) {
  EXPECT_THROW(Grid::weighted({1.0, 0.0}), InvalidArgument);
  EXPECT_THROW(Grid::weighted({1.0, -2.0}), InvalidArgument);
  EXPECT_THROW(Grid::interval(1.0, 1), InvalidArgument);
  EXPECT_THROW(Grid::rectangle(1.0, 1.0, 4, 1), InvalidArgument);
  EXPECT_THROW(GridFunction(unit_grid(3), std::vector<double>{1.0, 2.0}), InvalidArgument);
}

TEST(L0Measure, Examples) {
  auto g = unit_grid(4);
  EXPECT_EQ(l0_measure(GridFunction(g), 0.0), 0.0);
  EXPECT_EQ(l0_measure(GridFunction(g), 5.0), 0.0);
  EXPECT_EQ(l0_measure(GridFunction(g, {1, 0, -2, 0}), 0.0), 2.0);

  auto half = make_grid(Grid::weighted({0.5, 0.5}));
  EXPECT_EQ(l0_measure(GridFunction(half, {1e-14, 1.0}), 1e-12), 0.5);
  EXPECT_THROW((void)l0_measure(GridFunction(half), -1.0), InvalidArgument);
}

TEST(WeightedNormSq, Examples) {
  EXPECT_EQ(weighted_norm_sq(GridFunction(unit_grid(3))), 0.0);
  EXPECT_EQ(weighted_norm_sq(GridFunction(make_grid(Grid::weighted({3.0})), {2.0})), 12.0);
  EXPECT_EQ(weighted_norm_sq(GridFunction(make_grid(Grid::weighted({0.25, 0.75})), {1.0, 1.0})), 1.0);
}

TEST(Support, Examples) {
  auto g3 = unit_grid(3);
  const Indicator none = support(GridFunction(g3), 0.0);
  EXPECT_EQ(none.count(), 0u);
  const Indicator mid = support(GridFunction(g3, {0, 5, 0}), 0.0);
  EXPECT_FALSE(mid[0]);
  EXPECT_TRUE(mid[1]);
  EXPECT_FALSE(mid[2]);
  const Indicator tol = support(GridFunction(unit_grid(2), {1e-14, 1e-10}), 1e-12);
  EXPECT_FALSE(tol[0]);
  EXPECT_TRUE(tol[1]);
}

TEST(IndicatorDistance, Examples) {
  auto g = unit_grid(4);
  Indicator a(g, std::vector<bool>{true, false, true, false});
  Indicator b(g, std::vector<bool>{false, true, false, true});
  EXPECT_EQ(indicator_l1_distance(a, a), 0.0);
  EXPECT_EQ(indicator_l1_distance(a, b), 4.0);

  auto gw = make_grid(Grid::weighted({1.0, 0.3, 2.0}));
  Indicator c(gw, std::vector<bool>{true, false, true});
  Indicator d(gw, std::vector<bool>{true, true, true});
  EXPECT_DOUBLE_EQ(indicator_l1_distance(c, d), 0.3);

  EXPECT_THROW((void)indicator_l1_distance(a, c), GridMismatch);
}

TEST(IndicatorDistance, IsAMetricOnRandomTriples) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> wd(0.1, 2.0);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> ws(1 + trial % 17);
    for (double& x : ws) x = wd(rng);
    auto g = make_grid(Grid::weighted(ws));
    auto draw = [&] {
      Indicator c(g);
      for (std::size_t i = 0; i < g->size(); ++i) c.set(i, coin(rng));
      return c;
    };
    const Indicator a = draw(), b = draw(), c = draw();
    const double ab = indicator_l1_distance(a, b), bc = indicator_l1_distance(b, c),
                 ac = indicator_l1_distance(a, c);
    EXPECT_EQ(ab, indicator_l1_distance(b, a));
    EXPECT_LE(ac, ab + bc + 1e-12);
    EXPECT_EQ(indicator_l1_distance(a, a), 0.0);
    if (!(a == b)) EXPECT_GT(ab, 0.0);
  }
}

TEST(L0Measure, MonotoneInToleranceAndBoundedByTotal) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> wd(0.1, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> ws(12);
    for (double& x : ws) x = wd(rng);
    auto g = make_grid(Grid::weighted(ws));
    GridFunction u(g);
    bool has_zero = false;
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] = (i % 4 == static_cast<std::size_t>(trial % 4)) ? 0.0 : nd(rng);
      has_zero = has_zero || u[i] == 0.0;
    }
    double prev = l0_measure(u, 0.0);
    EXPECT_LE(prev, g->total_measure());
    EXPECT_EQ(prev == g->total_measure(), !has_zero);
    for (double t : {1e-6, 1e-3, 0.1, 0.5, 1.0, 3.0}) {
      const double m = l0_measure(u, t);
      EXPECT_LE(m, prev);
      EXPECT_DOUBLE_EQ(m, support(u, t).measure());
      prev = m;
    }
  }
}

TEST(GridIo, CsvRoundTripIsExact) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd(0.0, 1e3);
  for (const Grid& grid : {Grid::interval(1.0, 9), Grid::rectangle(2.0, 1.0, 4, 3)}) {
    auto g = make_grid(grid);
    GridFunction u(g);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = nd(rng) * std::pow(10.0, static_cast<double>(i % 7) - 3);
    std::stringstream ss;
    write_csv(ss, u);
    const GridFunction back = read_csv(ss, g);
    EXPECT_EQ(back, u);
  }
}

TEST(GridIo, RejectsMalformedInput) {
  auto g = make_grid(Grid::interval(1.0, 3));
  std::stringstream wrong_rows("index,x,value\n0,0.25,1\n1,0.5,2\n");
  EXPECT_THROW((void)read_csv(wrong_rows, g), ParseError);
  std::stringstream wrong_coord("index,x,value\n0,0.3,1\n1,0.5,2\n2,0.75,3\n");
  EXPECT_THROW((void)read_csv(wrong_coord, g), ParseError);
  std::stringstream garbage("index,x,value\n0,0.25,abc\n1,0.5,2\n2,0.75,3\n");
  EXPECT_THROW((void)read_csv(garbage, g), ParseError);
  EXPECT_THROW((void)read_csv(std::filesystem::path("/nonexistent/file.csv"), g), ParseError);
}

TEST(GridIo, FormatsSeventeenDigitsWithDot) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(-2.0), "-2");
  EXPECT_EQ(parse_double(" 1.5e-3 "), 1.5e-3);
}
