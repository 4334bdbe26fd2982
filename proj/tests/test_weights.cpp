#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace hologossip;
using namespace hologossip::testing;

namespace {

Walk walk(std::initializer_list<Node> one_based) {
  Walk w;
  for (Node v : one_based) w.nodes.push_back(v - 1);
  return w;
}

}  // namespace

TEST(WeightSet, RejectsOutOfRange) {
  auto g = path2();
  EXPECT_THROW(WeightSet<Q>(g, {{q(0), q(1, 2)}}), Error);
  EXPECT_THROW(WeightSet<Q>(g, {{q(1, 2), q(1)}}), Error);
  EXPECT_THROW(WeightSet<double>(g, {{0.5, 1.5}}), Error);
  EXPECT_THROW(WeightSet<double>(g, {}), Error);
  try {
    WeightSet<Q>(g, {{q(1, 2), q(3, 2)}});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_weight);
  }
}

TEST(WeightSet, WeightOrientation) {
  auto ws = holonomic_triangle();
  EXPECT_EQ(ws.weight(0, 1), q(1, 5));
  EXPECT_EQ(ws.weight(1, 0), q(3, 10));
  EXPECT_EQ(ws.weight(2, 0), q(3, 5));
  EXPECT_THROW(ws.weight(0, 0), Error);
}

TEST(LocalMatrix, WorkedExample) {
  auto g = triangle();
  WeightSet<double> ws(g, {{0.2, 0.3}, {0.5, 0.5}, {0.5, 0.5}});
  Matrix<double> a = local_matrix(ws, 0, 1);
  Matrix<double> want(3, 3, 0.0);
  want(0, 0) = 0.8, want(0, 1) = 0.2, want(1, 0) = 0.3, want(1, 1) = 0.7, want(2, 2) = 1.0;
  EXPECT_EQ(a, want);
  EXPECT_EQ(local_matrix(ws, 1, 0), a);
  EXPECT_DOUBLE_EQ(min_entry(a), 0.2);
}

TEST(LocalMatrix, StandardGossipBlock) {
  auto ws = WeightSet<Q>(path2(), {{q(1, 2), q(1, 2)}});
  Matrix<Q> a = local_matrix(ws, 0, 1);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(a(r, c), q(1, 2));
}

TEST(LocalMatrix, RowsSumToOneExactly) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_graph(rng, 2 + trial % 7);
    auto ws = random_weights(rng, g);
    for (const Edge& e : g->edges()) {
      Matrix<Q> a = local_matrix(ws, e.u, e.v);
      for (std::size_t r = 0; r < a.rows(); ++r) {
        Q sum = 0;
        for (const Q& v : a.row(r)) sum += v;
        EXPECT_EQ(sum, 1);
      }
    }
  }
}

TEST(Ratio, Examples) {
  auto ws = holonomic_triangle();
  EXPECT_EQ(ratio(ws, 0, 1), q(2, 3));
  EXPECT_EQ(ratio(ws, 1, 0), q(3, 2));
  auto sym = WeightSet<Q>(path2(), {{q(2, 7), q(2, 7)}});
  EXPECT_EQ(ratio(sym, 0, 1), 1);
}

TEST(Ratio, ReciprocalExactly) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_graph(rng, 2 + trial % 7);
    auto ws = random_weights(rng, g);
    for (const Edge& e : g->edges()) EXPECT_EQ(ratio(ws, e.u, e.v) * ratio(ws, e.v, e.u), 1);
  }
}

TEST(WalkRatio, Examples) {
  auto ws = holonomic_triangle();
  EXPECT_EQ(walk_ratio(ws, walk({1, 2, 3})), q(1, 3));
  EXPECT_EQ(walk_ratio(ws, walk({2})), 1);
  EXPECT_EQ(walk_ratio(ws, Walk{}), 1);
  EXPECT_EQ(walk_ratio(ws, walk({2, 1, 3, 2})), 1);
  EXPECT_THROW(walk_ratio(ws, walk({1, 1})), Error);
}

TEST(WalkRatio, MultiplicativeAndInverse) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = random_graph(rng, 2 + trial % 7);
    auto ws = random_weights(rng, g);
    Walk w1 = random_walk(rng, *g, 0, trial % 6);
    Walk w2 = random_walk(rng, *g, w1.nodes.back(), (trial / 3) % 6);
    EXPECT_EQ(walk_ratio(ws, w1.concat(w2)), walk_ratio(ws, w1) * walk_ratio(ws, w2));
    EXPECT_EQ(walk_ratio(ws, w1.concat(w1.inverse())), 1);
    EXPECT_EQ(walk_ratio(ws, w1.inverse()) * walk_ratio(ws, w1), 1);
  }
}

TEST(Holonomy, WorkedExamples) {
  EXPECT_TRUE(is_holonomic(holonomic_triangle()));

  auto report = check_holonomy(nonholonomic_triangle());
  ASSERT_FALSE(report.holonomic);
  ASSERT_TRUE(report.witness);
  EXPECT_EQ(report.witness->cycle, walk({2, 1, 3, 2}));
  // r_21 * r_13 * r_32 = 1 * 1/2 * 1.
  EXPECT_EQ(report.witness->value, q(1, 2));
  EXPECT_EQ(walk_ratio(nonholonomic_triangle(), report.witness->cycle.inverse()), 2);
}

TEST(Holonomy, TreesAreAlwaysHolonomic) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_graph(rng, 2 + trial % 8, 0.0);
    ASSERT_TRUE(g->is_tree());
    EXPECT_TRUE(is_holonomic(random_weights(rng, g)));
  }
}

TEST(Holonomy, FundamentalBasisDecidesAllClosedWalks) {
  // Holonomic sets built from a target give R = 1 on every closed walk;
  // random k/1000 weights on cyclic graphs are caught by the basis check.
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 3 + trial % 6;
    auto g = random_graph(rng, n, 0.5);
    auto p = random_target(rng, n);
    BoxPoint<Q> x;
    for (std::size_t e = 0; e < g->edge_count(); ++e) x.x.push_back(q(1 + trial % 9, 10));
    auto ws = preimage_point(theta(p, g), x);
    ASSERT_TRUE(is_holonomic(ws));
    for (int k = 0; k < 5; ++k) {
      Walk w = random_walk(rng, *g, 0, 1 + k * 3);
      Walk back = spanning_tree(*g, 0).path(w.nodes.back(), 0);
      EXPECT_EQ(walk_ratio(ws, w.concat(back)), 1);
    }
    if (g->edge_count() >= n) {
      auto rw = random_weights(rng, g);
      auto report = check_holonomy(rw);
      // Independent decision: some fundamental-cycle product differs from 1.
      bool any_off = false;
      for (const Walk& c : fundamental_cycles(*g, spanning_tree(*g, 0)))
        any_off = any_off || walk_ratio(rw, c) != 1;
      EXPECT_EQ(report.holonomic, !any_off);
      if (!report.holonomic) {
        EXPECT_NE(report.witness->value, 1);
      }
    }
  }
}

TEST(Holonomy, FloatTolerance) {
  auto ws = convert_weights<double>(holonomic_triangle());
  EXPECT_TRUE(is_holonomic(ws));
  EXPECT_FALSE(is_holonomic(convert_weights<double>(nonholonomic_triangle())));
  WeightSet<double> nudged(triangle(), {{0.2, 0.3}, {0.25, 0.5}, {0.2 * (1 + 1e-6), 0.6}});
  EXPECT_FALSE(is_holonomic(nudged));
  EXPECT_TRUE(is_holonomic(nudged, 1e-5));
}

TEST(MinWeight, Examples) {
  EXPECT_EQ(min_weight(holonomic_triangle()), q(1, 5));
  EXPECT_EQ(epsilon(holonomic_triangle()), q(1, 25));
  auto two = WeightSet<Q>(path2(), {{q(1, 3), q(2, 3)}});
  EXPECT_EQ(min_weight(two), q(1, 3));
  EXPECT_EQ(epsilon(two), q(1, 3));
  auto gossip = WeightSet<Q>(four_cycle(), std::vector<EdgeWeights<Q>>(4, {q(1, 2), q(1, 2)}));
  EXPECT_EQ(epsilon(gossip), q(1, 8));
}

TEST(ConvertWeights, RoundTrip) {
  auto ws = holonomic_triangle();
  auto d = convert_weights<double>(ws);
  EXPECT_DOUBLE_EQ(d.weight(0, 1), 0.2);
  EXPECT_DOUBLE_EQ(d.weight(2, 0), 0.6);
}
