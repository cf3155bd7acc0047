// The oracles are checked against values worked out by hand before they are
// trusted to check anything else.
#include <gtest/gtest.h>

#include "oracles.hpp"

using oracle::app;
using oracle::leaf;

TEST(Oracle, Catalan) {
  const auto c = oracle::catalan_table(10);
  const std::vector<oracle::Int> expected{1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796};
  EXPECT_EQ(c, expected);
}

TEST(Oracle, InverseSquareRootSeries) {
  const auto s = oracle::invsqrt_by_square_root(6);
  const std::vector<oracle::Int> expected{1, 2, 8, 32, 136, 592, 2624};
  EXPECT_EQ(s, expected);
}

TEST(Oracle, TreeCounts) {
  EXPECT_EQ(oracle::all_trees(0).size(), 2u);
  EXPECT_EQ(oracle::all_trees(1).size(), 4u);
  EXPECT_EQ(oracle::all_trees(3).size(), 80u);
  for (const auto& t : oracle::all_trees(4)) ASSERT_EQ(oracle::size(t), 4);
}

TEST(Oracle, Reduction) {
  const auto S = leaf('S'), K = leaf('K');
  // S K K K -> K K (K K) -> K
  const auto skkk = app(app(app(S, K), K), K);
  EXPECT_EQ(oracle::length(skkk, 10), 2);
  EXPECT_EQ(oracle::show(*oracle::step(skkk)), "((K K) (K K))");
  EXPECT_EQ(oracle::length(app(S, K), 10), 0);
  // The redex sits inside the argument of a stuck head.
  EXPECT_EQ(oracle::show(*oracle::step(app(S, app(app(K, K), S)))), "(S K)");
  const auto i = app(app(S, K), K);
  const auto w = app(app(S, i), i);
  EXPECT_EQ(oracle::length(app(w, w), 500), -1);
}

TEST(Oracle, Containment) {
  const auto S = leaf('S'), K = leaf('K');
  EXPECT_TRUE(oracle::contains(app(S, app(K, K)), app(K, K)));
  EXPECT_FALSE(oracle::contains(app(app(K, K), S), app(K, S)));
  EXPECT_TRUE(oracle::contains(K, K));
}

TEST(Oracle, Types) {
  const auto S = leaf('S'), K = leaf('K');
  oracle::Typer a;
  std::map<int, int> names;
  EXPECT_EQ(oracle::show_type(*a.infer(app(app(S, K), K)), names), "a -> a");
  oracle::Typer b;
  const auto i = app(app(S, K), K);
  EXPECT_FALSE(b.infer(app(app(S, i), i)));
}
