#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace hologossip;
using namespace hologossip::testing;

namespace {

Matrix<double> from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix<double> m(rows.size(), rows.begin()->size(), 0.0);
  std::size_t r = 0;
  for (const auto& row : rows) {
    std::size_t c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

Matrix<double> rank_one(const std::vector<double>& p) {
  Matrix<double> m(p.size(), p.size(), 0.0);
  for (std::size_t r = 0; r < p.size(); ++r)
    for (std::size_t c = 0; c < p.size(); ++c) m(r, c) = p[c];
  return m;
}

double max_diff(const Matrix<double>& a, const Matrix<double>& b) {
  double worst = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
  return worst;
}

Digraph support(const Matrix<double>& m) { return graph_of(m); }

bool subset(const Digraph& a, const Digraph& b) {
  for (Node i = 0; i < a.node_count(); ++i)
    for (Node j = 0; j < a.node_count(); ++j)
      if (a.has_edge(i, j) && !b.has_edge(i, j)) return false;
  return true;
}

WeightSet<double> holonomic_triangle_d() { return convert_weights<double>(holonomic_triangle()); }

}  // namespace

TEST(GossipStep, Examples) {
  auto g = triangle();
  WeightSet<double> ws(g, {{0.2, 0.3}, {0.5, 0.5}, {0.5, 0.5}});
  auto x = gossip_step(ws, {1, 0, 0}, 0, 1);
  EXPECT_DOUBLE_EQ(x[0], 0.8);
  EXPECT_DOUBLE_EQ(x[1], 0.3);
  EXPECT_DOUBLE_EQ(x[2], 0.0);
  for (double v : gossip_step(ws, {0.4, 0.4, 0.4}, 1, 0)) EXPECT_DOUBLE_EQ(v, 0.4);

  WeightSet<double> avg(path2(), {{0.5, 0.5}});
  EXPECT_EQ(gossip_step(avg, {1, 0}, 0, 1), (std::vector<double>{0.5, 0.5}));
  auto tree = make_graph(3, {{0, 1}, {1, 2}});
  WeightSet<double> tw(tree, {{0.5, 0.5}, {0.5, 0.5}});
  EXPECT_THROW(gossip_step(tw, {1, 0, 0}, 0, 2), Error);
}

TEST(ProductTracker, Examples) {
  auto ws = holonomic_triangle_d();
  ProductTracker t(3);
  t.step(ws, 0);
  EXPECT_EQ(t.product(), local_matrix(ws, 0, 1));
  EXPECT_EQ(t.steps(), 1u);

  ProductTracker a(3), b(3);
  a.step(ws, 0);
  a.step(ws, 1);
  b.step(ws, 1);
  b.step(ws, 0);
  EXPECT_LT(max_diff(a.product(), local_matrix(ws, 1, 2) * local_matrix(ws, 0, 1)), 1e-15);
  EXPECT_GT(max_diff(a.product(), b.product()), 1e-3);
}

TEST(ProductTracker, MatchesDenseOracleAndSupportGrows) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 2 + trial % 4;
    auto g = random_graph(rng, n);
    auto ws = random_weights_double(rng, g);
    std::uniform_int_distribution<EdgeId> pick(0, g->edge_count() - 1);
    ProductTracker t(n);
    EdgeSequence seq;
    Digraph previous = support(t.product());
    for (int k = 0; k < 30; ++k) {
      EdgeId id = pick(rng);
      seq.push_back(id);
      t.step(ws, id);
      Digraph now = support(t.product());
      EXPECT_TRUE(subset(previous, now));
      previous = now;
      for (std::size_t r = 0; r < n; ++r) {
        double sum = 0.0;
        for (double v : t.product().row(r)) {
          EXPECT_GE(v, 0.0);
          sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
      }
    }
    EXPECT_LE(max_diff(t.product(), dense_product(ws, seq)), 1e-14);
  }
}

TEST(ProductTracker, MinOverUnchangedColumnSupportDoesNotDecrease) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 2 + trial % 6;
    auto g = random_graph(rng, n);
    auto ws = random_weights_double(rng, g);
    std::uniform_int_distribution<EdgeId> pick(0, g->edge_count() - 1);
    ProductTracker t(n);
    for (int k = 0; k < 40; ++k) {
      Matrix<double> before = t.product();
      t.step(ws, pick(rng));
      for (std::size_t c = 0; c < n; ++c) {
        bool same_support = true;
        double min_before = 1.0, min_after = 1.0;
        for (std::size_t r = 0; r < n; ++r) {
          same_support = same_support && ((before(r, c) > 0) == (t.product()(r, c) > 0));
          if (before(r, c) > 0) min_before = std::min(min_before, before(r, c));
          if (t.product()(r, c) > 0) min_after = std::min(min_after, t.product()(r, c));
        }
        if (same_support) {
          EXPECT_GE(min_after, min_before - 1e-15);
        }
      }
    }
  }
}

TEST(Seminorm, Examples) {
  EXPECT_EQ(seminorm(Matrix<double>::identity(2)), 1.0);
  EXPECT_EQ(seminorm(rank_one({0.2, 0.5, 0.3})), 0.0);
  EXPECT_DOUBLE_EQ(seminorm(from_rows({{0.8, 0.2}, {0.3, 0.7}})), 0.5);
}

TEST(Seminorm, NonIncreasingAlongRuns) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_graph(rng, 2 + trial % 7);
    auto ws = random_weights_double(rng, g);
    std::uniform_int_distribution<EdgeId> pick(0, g->edge_count() - 1);
    ProductTracker t(g->node_count());
    double last = t.seminorm();
    for (int k = 0; k < 100; ++k) {
      t.step(ws, pick(rng));
      EXPECT_LE(t.seminorm(), last + 1e-15);
      last = t.seminorm();
    }
  }
}

TEST(Ergodicity, Examples) {
  EXPECT_EQ(ergodicity(Matrix<double>::identity(3)), 1.0);
  EXPECT_EQ(ergodicity(rank_one({0.1, 0.9})), 0.0);
  EXPECT_DOUBLE_EQ(ergodicity(from_rows({{0.8, 0.2}, {0.3, 0.7}})), 0.5);
  try {
    ergodicity(from_rows({{0.5, 0.2}, {0.3, 0.7}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_stochastic);
  }
}

TEST(Scrambling, Examples) {
  EXPECT_FALSE(is_scrambling(Matrix<double>::identity(3)));
  EXPECT_TRUE(is_scrambling(from_rows({{0.5, 0.5}, {0.1, 0.9}})));
  auto ws = holonomic_triangle_d();
  EXPECT_FALSE(is_scrambling(local_matrix(ws, 0, 1)));
}

TEST(Contraction, RandomProductPairs) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 2 + trial % 5;
    auto g = random_graph(rng, n);
    auto ws = random_weights_double(rng, g);
    std::uniform_int_distribution<EdgeId> pick(0, g->edge_count() - 1);
    EdgeSequence sp, sq;
    for (int k = 0; k < 8; ++k) sp.push_back(pick(rng)), sq.push_back(pick(rng));
    Matrix<double> p = dense_product(ws, sp), q = dense_product(ws, sq);
    EXPECT_LE(seminorm(p * q), ergodicity(p) * seminorm(q) + 1e-12);
    double mu = ergodicity(p);
    EXPECT_GE(mu, 0.0);
    EXPECT_LE(mu, 1.0 + 1e-15);
  }
}

TEST(Scrambling, SpanningStringsProduceScrambling) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 2 + trial % 7;
    auto g = random_graph(rng, n);
    auto ws = random_weights_double(rng, g);
    EdgeSequence seq;
    for (std::size_t k = 0; k < std::max<std::size_t>(1, n / 2); ++k) {
      auto s = random_spanning_string(rng, *g, trial % 4);
      seq.insert(seq.end(), s.begin(), s.end());
    }
    Matrix<double> p = dense_product(ws, seq);
    ASSERT_TRUE(is_scrambling(p)) << "n=" << n;
    EXPECT_LE(ergodicity(p), 1.0 - min_entry(p) + 1e-12);
  }
}

TEST(ClassifySchedule, Examples) {
  auto tri = triangle();
  auto c = classify_schedule(periodic_schedule(tri, {0, 1}, 5));
  EXPECT_TRUE(c.spanning);
  EXPECT_EQ(c.m_spanning, std::size_t{2});

  c = classify_schedule(explicit_schedule(tri, {0}));
  EXPECT_FALSE(c.spanning);
  EXPECT_FALSE(c.m_spanning);

  c = classify_schedule(periodic_schedule(path2(), {0}, 3));
  EXPECT_TRUE(c.spanning);
  EXPECT_EQ(c.m_spanning, std::size_t{1});

  c = classify_schedule(random_schedule(tri, 1, 10));
  EXPECT_TRUE(c.probabilistic);
  EXPECT_FALSE(c.m_spanning);

  c = classify_schedule(periodic_schedule(tri, {0, 0, 1}, 2));
  EXPECT_EQ(c.m_spanning, std::size_t{3});
  EXPECT_FALSE(classify_schedule(periodic_schedule(tri, {0, 0}, 2)).spanning);
}

TEST(ClassifySchedule, WindowsAreSpanningForFoundM) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = random_graph(rng, 2 + trial % 6);
    auto period = random_spanning_string(rng, *g, trial % 5);
    Schedule s = periodic_schedule(g, period, 3);
    auto c = classify_schedule(s);
    ASSERT_TRUE(c.spanning);
    ASSERT_TRUE(c.m_spanning);
    auto seq = materialize(s);
    std::size_t m = *c.m_spanning;
    for (std::size_t start = 0; start + m <= seq.size(); ++start)
      EXPECT_TRUE(is_spanning(*g, EdgeSequence(seq.begin() + start, seq.begin() + start + m)));
    if (m > 1) {
      bool some_short_fails = false;
      for (std::size_t start = 0; start + m - 1 <= seq.size(); ++start)
        some_short_fails =
            some_short_fails || !is_spanning(*g, EdgeSequence(seq.begin() + start, seq.begin() + start + m - 1));
      EXPECT_TRUE(some_short_fails);
    }
  }
}

TEST(Schedule, Construction) {
  auto tri = triangle();
  EXPECT_THROW(periodic_schedule(tri, {}, 3), Error);
  EXPECT_THROW(random_schedule(tri, 1, 0), Error);
  EXPECT_THROW(explicit_schedule(tri, {3}), Error);
  EXPECT_EQ(materialize(periodic_schedule(tri, {0, 2}, 2)), (EdgeSequence{0, 2, 0, 2}));
  EXPECT_EQ(materialize(random_schedule(tri, 9, 50)), materialize(random_schedule(tri, 9, 50)));
  EXPECT_NE(materialize(random_schedule(tri, 9, 50)), materialize(random_schedule(tri, 10, 50)));
}

TEST(RandomSchedule, PinnedDraws) {
  // The generator is std::mt19937_64 with rejection-sampled bounded draws;
  // these values must not change across platforms or releases.
  auto tri = triangle();
  EXPECT_EQ(materialize(random_schedule(tri, 7, 12)), (EdgeSequence{0, 0, 0, 0, 1, 0, 0, 1, 0, 2, 1, 0}));
}

TEST(Run, WorkedHolonomicTriangle) {
  auto ws = holonomic_triangle_d();
  RunReport r = run(ws, random_schedule(ws.graph_ptr(), 7, 10'000));
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.final_seminorm, 1e-10);
  EXPECT_NEAR(r.limit[0], 0.5, 1e-8);
  EXPECT_NEAR(r.limit[1], 1.0 / 3.0, 1e-8);
  EXPECT_NEAR(r.limit[2], 1.0 / 6.0, 1e-8);
  for (std::size_t row = 0; row < 3; ++row)
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(r.product(row, c), r.limit[c], 1e-10);
  EXPECT_TRUE(verify_left_eigenvector(ws, r.limit, 1e-9));
}

TEST(Run, TwoNodeClosedForm) {
  WeightSet<double> ws(path2(), {{1.0 / 3.0, 2.0 / 3.0}});
  RunReport r = run(ws, periodic_schedule(ws.graph_ptr(), {0}, 200));
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.limit[0], 2.0 / 3.0, 1e-10);
  EXPECT_NEAR(r.limit[1], 1.0 / 3.0, 1e-10);
}

TEST(Run, TreeRestrictedNonHolonomic) {
  auto ws = convert_weights<double>(nonholonomic_triangle());
  auto g = ws.graph_ptr();
  RunReport a = run(ws, periodic_schedule(g, {0, 1}, 2'000));
  RunReport b = run(ws, periodic_schedule(g, {0, 2}, 2'000));
  ASSERT_TRUE(a.converged && b.converged);
  for (double v : a.limit) EXPECT_NEAR(v, 1.0 / 3.0, 1e-8);
  EXPECT_NEAR(b.limit[0], 0.4, 1e-8);
  EXPECT_NEAR(b.limit[1], 0.4, 1e-8);
  EXPECT_NEAR(b.limit[2], 0.2, 1e-8);
}

TEST(Run, TraceAndLedger) {
  auto ws = holonomic_triangle_d();
  RunReport r = run(ws, periodic_schedule(ws.graph_ptr(), {0, 1, 2}, 500), RunOptions{0.0, std::nullopt, 1'500});
  EXPECT_EQ(r.steps, 1'500u);
  EXPECT_EQ(r.m_spanning, std::size_t{2});
  EXPECT_DOUBLE_EQ(r.epsilon, 0.2 * 0.2);
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.trace.front().t, 0u);
  EXPECT_FALSE(r.trace.front().edge);
  EXPECT_EQ(r.trace.back().t, 1'500u);
  // Every step up to 1000, then every 100.
  EXPECT_EQ(r.trace.size(), 1001u + 5u);
  for (const TraceRow& row : r.trace) {
    ASSERT_TRUE(row.bound);
    EXPECT_DOUBLE_EQ(*row.bound, std::pow(0.96, row.t / 2.0 - 1.0));
  }
  EXPECT_LE(r.trace[1].min_entry, 1.0);
}

TEST(Run, EarlyStopAndBudget) {
  auto ws = holonomic_triangle_d();
  RunReport r = run(ws, random_schedule(ws.graph_ptr(), 3, 10'000));
  EXPECT_LT(r.steps, 10'000u);
  EXPECT_EQ(r.trace.back().t, r.steps);
  EXPECT_FALSE(r.m_spanning);
  EXPECT_FALSE(r.max_bound_violation);

  RunReport short_run = run(ws, random_schedule(ws.graph_ptr(), 7, 3));
  EXPECT_FALSE(short_run.converged);
  EXPECT_EQ(short_run.steps, 3u);

  RunReport capped = run(ws, random_schedule(ws.graph_ptr(), 7, 10'000), RunOptions{1e-10, std::nullopt, 5});
  EXPECT_EQ(capped.steps, 5u);
}

TEST(Run, InitialStateReachesWeightedAverage) {
  auto ws = holonomic_triangle_d();
  RunOptions opts;
  opts.initial_state = std::vector<double>{6.0, 0.0, 3.0};
  RunReport r = run(ws, random_schedule(ws.graph_ptr(), 11, 10'000), opts);
  ASSERT_TRUE(r.final_state);
  double want = 0.5 * 6.0 + (1.0 / 6.0) * 3.0;
  for (double v : *r.final_state) EXPECT_NEAR(v, want, 1e-8);
}

TEST(Run, Errors) {
  auto ws = holonomic_triangle_d();
  EXPECT_THROW(run(ws, random_schedule(four_cycle(), 1, 10)), Error);
  RunOptions opts;
  opts.initial_state = std::vector<double>{1.0};
  EXPECT_THROW(run(ws, random_schedule(ws.graph_ptr(), 1, 10), opts), Error);
}

TEST(Run, SeedsAgree) {
  auto ws = holonomic_triangle_d();
  RunReport a = run(ws, random_schedule(ws.graph_ptr(), 7, 10'000));
  RunReport b = run(ws, random_schedule(ws.graph_ptr(), 8, 10'000));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a.limit[i], b.limit[i], 1e-8);
}

TEST(RunBatch, MatchesSequentialInOrder) {
  auto ws = holonomic_triangle_d();
  std::vector<Schedule> schedules;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) schedules.push_back(random_schedule(ws.graph_ptr(), seed, 5'000));
  auto batch = run_batch(ws, schedules);
  ASSERT_EQ(batch.size(), schedules.size());
  for (std::size_t k = 0; k < schedules.size(); ++k) {
    RunReport seq = run(ws, schedules[k]);
    EXPECT_EQ(batch[k].steps, seq.steps);
    EXPECT_EQ(batch[k].limit, seq.limit);
  }
}

TEST(MinEntryFloor, Examples) {
  auto ws = holonomic_triangle_d();
  auto g = ws.graph_ptr();
  auto empty = min_entry_floor_report(ws, explicit_schedule(g, {}));
  EXPECT_TRUE(empty.holds);
  EXPECT_EQ(empty.smallest, 1.0);

  for (EdgeId id = 0; id < 3; ++id) EXPECT_TRUE(min_entry_floor_check(ws, explicit_schedule(g, {id})));

  auto f = min_entry_floor_report(ws, random_schedule(g, 1, 1000));
  EXPECT_TRUE(f.holds);
  EXPECT_DOUBLE_EQ(f.floor, 0.04);
  EXPECT_GT(f.smallest, f.floor);
}

TEST(MinEntryFloor, TwoNodesMeetTheFloorExactly) {
  WeightSet<double> ws(path2(), {{0.25, 0.6}});
  auto f = min_entry_floor_report(ws, explicit_schedule(ws.graph_ptr(), {0}));
  EXPECT_TRUE(f.holds);
  EXPECT_EQ(f.smallest, f.floor);
}

TEST(MinEntryFloor, RandomGraphs) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    auto g = random_graph(rng, 2 + trial % 7);
    auto ws = random_weights_double(rng, g);
    EXPECT_TRUE(min_entry_floor_check(ws, random_schedule(g, trial, 300)));
  }
}

TEST(BoundLedger, ExtendedPrecisionHasNoViolations) {
  auto ws = holonomic_triangle();
  auto ledger = extended_bound_ledger(ws, periodic_schedule(ws.graph_ptr(), {0, 1, 2}, 1'000));
  EXPECT_EQ(ledger.m, 2u);
  EXPECT_EQ(ledger.violations, 0u);
  EXPECT_EQ(ledger.last_t, 3'000u);
  EXPECT_LT(ledger.max_violation, 0.0);
  EXPECT_THROW(extended_bound_ledger(ws, random_schedule(ws.graph_ptr(), 1, 10)), Error);
}

TEST(Seminorm, ZeroIffEqualRows) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 2 + trial % 4;
    std::vector<double> p(n);
    for (double& v : p) v = u(rng);
    Matrix<double> m = rank_one(p);
    EXPECT_EQ(seminorm(m), 0.0);
    m(trial % n, trial % n) += 0.25;
    EXPECT_DOUBLE_EQ(seminorm(m), 0.25);
  }
}
