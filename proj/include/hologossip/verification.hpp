#pragma once

// The ten acceptance checks, shared by the acceptance test binary and
// `hologossip verify`. Every check is deterministic: randomness comes from the
// library Rng seeded per check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <string>
#include <vector>

#include "design.hpp"
#include "engine.hpp"
#include "graph.hpp"
#include "limit.hpp"
#include "random.hpp"
#include "weights.hpp"

namespace hologossip::verification {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Pinned tolerances.
inline constexpr double kLimitTol = 1e-8;
inline constexpr double kRowSpreadTol = 1e-10;
inline constexpr double kFloatDesignTol = 1e-12;
inline constexpr double kInequalitySlack = 1e-12;
inline constexpr double kDenseTol = 1e-14;
inline constexpr double kRuntimeBudget = 1.0;

namespace detail {

inline std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

/// The worked triangle: limit [1/2, 1/3, 1/6].
inline WeightSet<Rational> holonomic_triangle() {
  auto g = make_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  return WeightSet<Rational>(g, {{Rational(1, 5), Rational(3, 10)},
                                 {Rational(1, 4), Rational(1, 2)},
                                 {Rational(1, 5), Rational(3, 5)}});
}

/// r_12 = r_23 = 1, r_13 = 1/2.
inline WeightSet<Rational> nonholonomic_triangle() {
  auto g = make_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  return WeightSet<Rational>(g, {{Rational(1, 2), Rational(1, 2)},
                                 {Rational(1, 2), Rational(1, 2)},
                                 {Rational(1, 4), Rational(1, 2)}});
}

/// Random recursive tree plus every other pair with probability 0.35.
inline GraphPtr random_graph(Rng& rng, std::size_t n) {
  std::vector<std::pair<Node, Node>> pairs;
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  for (Node v = 1; v < n; ++v) {
    Node parent = static_cast<Node>(uniform_index(rng, v));
    pairs.emplace_back(parent, v);
    used[parent][v] = used[v][parent] = true;
  }
  for (Node a = 0; a < n; ++a)
    for (Node b = a + 1; b < n; ++b)
      if (!used[a][b] && uniform_unit(rng) < 0.35) pairs.emplace_back(a, b);
  return make_graph(n, pairs);
}

inline std::size_t random_size(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(uniform_index(rng, hi - lo + 1));
}

/// Interior target with integer masses in [1, 10].
inline ProbabilityVector<Rational> random_target(Rng& rng, std::size_t n) {
  std::vector<Rational> mass;
  for (std::size_t i = 0; i < n; ++i) mass.emplace_back(1 + static_cast<long>(uniform_index(rng, 10)));
  return normalize(mass);
}

/// Weights k/1000, k uniform in [1, 999].
inline WeightSet<Rational> random_rational_weights(Rng& rng, const GraphPtr& g) {
  std::vector<EdgeWeights<Rational>> w;
  for (std::size_t e = 0; e < g->edge_count(); ++e)
    w.push_back({Rational(1 + static_cast<long>(uniform_index(rng, 999)), 1000),
                 Rational(1 + static_cast<long>(uniform_index(rng, 999)), 1000)});
  return WeightSet<Rational>(g, std::move(w));
}

inline WeightSet<double> random_double_weights(Rng& rng, const GraphPtr& g) {
  std::vector<EdgeWeights<double>> w;
  for (std::size_t e = 0; e < g->edge_count(); ++e)
    w.push_back({0.05 + 0.9 * uniform_unit(rng), 0.05 + 0.9 * uniform_unit(rng)});
  return WeightSet<double>(g, std::move(w));
}

inline EdgeSequence random_edges(Rng& rng, const Graph& g, std::size_t length) {
  EdgeSequence out;
  for (std::size_t k = 0; k < length; ++k) out.push_back(static_cast<EdgeId>(uniform_index(rng, g.edge_count())));
  return out;
}

/// Random string that covers a spanning tree: random edges until connected.
inline EdgeSequence random_spanning_string(Rng& rng, const Graph& g) {
  EdgeSequence out;
  UnionFind uf(g.node_count());
  while (uf.components() > 1) {
    EdgeId id = static_cast<EdgeId>(uniform_index(rng, g.edge_count()));
    uf.unite(g.edge(id).u, g.edge(id).v);
    out.push_back(id);
  }
  return out;
}

/// Dense local matrix, written out entry by entry.
inline Matrix<double> dense_local(std::size_t n, const Edge& e, const EdgeWeights<double>& w) {
  Matrix<double> m(n, n, 0.0);
  for (std::size_t k = 0; k < n; ++k) m(k, k) = 1.0;
  m(e.u, e.u) = 1.0 - w.a_ij;
  m(e.u, e.v) = w.a_ij;
  m(e.v, e.u) = w.a_ji;
  m(e.v, e.v) = 1.0 - w.a_ji;
  return m;
}

inline Matrix<double> dense_product(const WeightSet<double>& ws, const EdgeSequence& seq) {
  Matrix<double> p = Matrix<double>::identity(ws.node_count());
  for (EdgeId id : seq) p = dense_local(ws.node_count(), ws.graph().edge(id), ws.edge_weights(id)) * p;
  return p;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

template <Scalar T>
std::vector<double> as_doubles(const ProbabilityVector<T>& p) {
  std::vector<double> out;
  for (const T& v : p.entries) out.push_back(to_double(v));
  return out;
}

/// max |P - 1 p^T|.
inline double distance_to_rank_one(const Matrix<double>& m, const std::vector<double>& p) {
  double worst = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) worst = std::max(worst, std::abs(m(r, c) - p[c]));
  return worst;
}

/// Random schedule run until the row spread drops below kRowSpreadTol.
inline RunReport converge(const WeightSet<double>& ws, std::uint64_t seed, std::size_t budget = 2'000'000) {
  return run(ws, random_schedule(ws.graph_ptr(), seed, budget), RunOptions{kRowSpreadTol, std::nullopt, std::nullopt});
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline CheckResult limit_correctness() {
  auto exact = consensus_limit(detail::holonomic_triangle()).probability;
  auto ws = convert_weights<double>(detail::holonomic_triangle());
  auto start = std::chrono::steady_clock::now();
  RunReport r = run(ws, random_schedule(ws.graph_ptr(), 7, 10'000), RunOptions{0.0, std::nullopt, std::nullopt});
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  double spread = detail::distance_to_rank_one(r.product, r.limit);
  double err = detail::max_abs_diff(r.limit, detail::as_doubles(exact));
  bool exact_ok = exact.entries == std::vector<Rational>{Rational(1, 2), Rational(1, 3), Rational(1, 6)};
  CheckResult out{1, "limit correctness", false, "", 0.0};
  out.passed = exact_ok && r.steps == 10'000 && spread < kRowSpreadTol && err <= kLimitTol && seconds < kRuntimeBudget;
  out.detail = detail::fmt("max|P - 1p^T| = %.3g, |p_hat - p| = %.3g, %.3f s", spread, err, seconds);
  return out;
}

inline CheckResult order_independence() {
  auto ws = convert_weights<double>(detail::holonomic_triangle());
  auto g = ws.graph_ptr();
  std::vector<Schedule> schedules;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) schedules.push_back(random_schedule(g, seed, 10'000));
  schedules.push_back(periodic_schedule(g, {0, 1, 2}, 3'000));
  schedules.push_back(periodic_schedule(g, {2, 1}, 5'000));
  schedules.push_back(periodic_schedule(g, {1, 0, 0, 2}, 2'500));
  auto reports = run_batch(ws, schedules);
  bool all_converged = true;
  double worst = 0.0;
  for (std::size_t a = 0; a < reports.size(); ++a) {
    all_converged = all_converged && reports[a].converged;
    for (std::size_t b = a + 1; b < reports.size(); ++b)
      worst = std::max(worst, detail::max_abs_diff(reports[a].limit, reports[b].limit));
  }
  CheckResult out{2, "order independence", all_converged && worst <= kLimitTol, "", 0.0};
  out.detail = detail::fmt("23 schedules, largest pairwise |p_hat - p_hat'| = %.3g", worst);
  return out;
}

inline CheckResult exponential_bound() {
  auto ws = detail::holonomic_triangle();
  auto g = ws.graph_ptr();
  const double eps = std::pow(to_double(min_weight(ws)), 2);
  // Every ordering of the three triangle edges gives a 2-spanning period.
  EdgeSequence period{0, 1, 2};
  std::size_t violations = 0, recorded = 0, last_t = 0;
  double worst = -1.0;
  bool classified = true;
  do {
    Schedule s = periodic_schedule(g, period, 3'334);
    BoundLedger ledger = extended_bound_ledger(ws, s, std::size_t{10'000});
    classified = classified && ledger.m == 2 && std::abs(ledger.epsilon - eps) <= 1e-15;
    violations += ledger.violations;
    worst = std::max(worst, ledger.max_violation);
    recorded += ledger.rows;
    last_t = std::max(last_t, ledger.last_t);
  } while (std::next_permutation(period.begin(), period.end()));
  CheckResult out{3, "exponential bound", classified && violations == 0 && last_t == 10'000, "", 0.0};
  out.detail = detail::fmt("eps = %.3g, m = 2, %.0f recorded rows up to t = %.0f, ", eps,
                           static_cast<double>(recorded), static_cast<double>(last_t)) +
               std::to_string(violations) + " violations, max(seminorm - bound) = " + detail::fmt("%.3g", worst);
  return out;
}

inline CheckResult holonomy_necessity() {
  auto exact = detail::nonholonomic_triangle();
  auto ws = convert_weights<double>(exact);
  auto g = ws.graph_ptr();
  auto p1 = tree_vector(exact, spanning_tree_from_edges(*g, {0, 1}));
  auto p2 = tree_vector(exact, spanning_tree_from_edges(*g, {0, 2}));
  const std::vector<Rational> want1{Rational(1, 3), Rational(1, 3), Rational(1, 3)};
  const std::vector<Rational> want2{Rational(2, 5), Rational(2, 5), Rational(1, 5)};
  bool oracle_ok = p1.entries == want1 && p2.entries == want2 && p2[0] - p1[0] >= Rational(1, 15);
  RunReport r1 = run(ws, periodic_schedule(g, {0, 1}, 5'000));
  RunReport r2 = run(ws, periodic_schedule(g, {0, 2}, 5'000));
  double e1 = detail::max_abs_diff(r1.limit, detail::as_doubles(p1));
  double e2 = detail::max_abs_diff(r2.limit, detail::as_doubles(p2));
  double gap = r2.limit[0] - r1.limit[0];
  CheckResult out{4, "holonomy necessity", false, "", 0.0};
  out.passed = oracle_ok && r1.converged && r2.converged && e1 <= kLimitTol && e2 <= kLimitTol &&
               gap >= 1.0 / 15.0 - 2 * kLimitTol;
  out.detail = detail::fmt("|p' - 1/3| = %.3g, |p'' - (2/5,2/5,1/5)| = %.3g, first-entry gap = %.12f", e1, e2, gap);
  return out;
}

inline CheckResult inverse_design() {
  Rng rng = make_rng(5);
  std::size_t exact_ok = 0, float_ok = 0, sim_ok = 0;
  double float_dev = 0.0, sim_dev = 0.0;
  const std::size_t cases = 100;
  for (std::size_t k = 0; k < cases; ++k) {
    std::size_t n = detail::random_size(rng, 2, 8);
    auto g = detail::random_graph(rng, n);
    auto p = detail::random_target(rng, n);
    auto box = sample_box_point<Rational>(*g, rng());
    auto ws = design_for(p, g, box);
    if (consensus_limit(ws).probability == p) ++exact_ok;

    auto pd = ProbabilityVector<double>{detail::as_doubles(p)};
    BoxPoint<double> boxd;
    for (const Rational& x : box.x) boxd.x.push_back(to_double(x));
    auto wsd = design_for(pd, g, boxd);
    double dev = detail::max_abs_diff(detail::as_doubles(consensus_limit(wsd).probability), pd.entries);
    float_dev = std::max(float_dev, dev);
    if (dev <= kFloatDesignTol) ++float_ok;

    RunReport r = detail::converge(wsd, k + 1);
    double err = detail::max_abs_diff(r.limit, pd.entries);
    sim_dev = std::max(sim_dev, err);
    if (r.converged && err <= kLimitTol) ++sim_ok;
  }
  CheckResult out{5, "inverse design", exact_ok == cases && float_ok == cases && sim_ok == cases, "", 0.0};
  out.detail = std::to_string(exact_ok) + "/100 exact, " + std::to_string(float_ok) + "/100 float (max dev " +
               detail::fmt("%.3g", float_dev) + "), " + std::to_string(sim_ok) + "/100 simulated (max err " +
               detail::fmt("%.3g", sim_dev) + ")";
  return out;
}

inline CheckResult fiber_property() {
  Rng rng = make_rng(6);
  auto g = detail::random_graph(rng, 6);
  auto p = detail::random_target(rng, 6);
  std::vector<RatioVector<Rational>> images;
  std::vector<std::vector<double>> limits;
  std::vector<std::vector<Rational>> boxes;
  bool converged = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto box = sample_box_point<Rational>(*g, seed);
    boxes.push_back(box.x);
    auto ws = design_for(p, g, box);
    images.push_back(phi(ws));
    RunReport r = detail::converge(convert_weights<double>(ws), 100 + seed);
    converged = converged && r.converged;
    limits.push_back(r.limit);
  }
  bool distinct = true, same_image = true;
  double worst = 0.0;
  for (std::size_t a = 0; a < images.size(); ++a)
    for (std::size_t b = a + 1; b < images.size(); ++b) {
      distinct = distinct && boxes[a] != boxes[b];
      same_image = same_image && images[a] == images[b];
      worst = std::max(worst, detail::max_abs_diff(limits[a], limits[b]));
    }
  CheckResult out{6, "fiber property", distinct && same_image && converged && worst <= kLimitTol, "", 0.0};
  out.detail = std::string("10 box points on n = 6, phi images ") + (same_image ? "identical" : "differ") +
               detail::fmt(", largest pairwise limit gap = %.3g", worst);
  return out;
}

inline CheckResult eigenvector_characterization() {
  Rng rng = make_rng(7);
  std::size_t pass_holonomic = 0, reject_nonholonomic = 0;
  for (int k = 0; k < 50; ++k) {
    std::size_t n = detail::random_size(rng, 2, 8);
    auto g = detail::random_graph(rng, n);
    auto ws = design_for(detail::random_target(rng, n), g, sample_box_point<Rational>(*g, rng()));
    if (is_holonomic(ws) && verify_left_eigenvector(ws, consensus_limit(ws).probability)) ++pass_holonomic;
  }
  for (int k = 0; k < 50; ++k) {
    GraphPtr g;
    do {
      g = detail::random_graph(rng, detail::random_size(rng, 3, 8));
    } while (g->is_tree());
    auto ws = detail::random_rational_weights(rng, g);
    auto trees = nonholonomy_witness_trees(ws);
    if (!trees) continue;
    if (!verify_left_eigenvector(ws, trees->path_vector) && !verify_left_eigenvector(ws, trees->closing_vector) &&
        !verify_left_eigenvector(ws, tree_vector(ws, spanning_tree(*g, 0))))
      ++reject_nonholonomic;
  }
  CheckResult out{7, "eigenvector characterization", pass_holonomic == 50 && reject_nonholonomic == 50, "", 0.0};
  out.detail = std::to_string(pass_holonomic) + "/50 holonomic sets accepted, " +
               std::to_string(reject_nonholonomic) + "/50 non-holonomic sets rejected for all candidates";
  return out;
}

inline CheckResult min_entry_floor() {
  Rng rng = make_rng(8);
  std::size_t violations = 0, ties = 0, largest_tie_n = 0;
  double tightest = 1.0;
  for (int k = 0; k < 100; ++k) {
    std::size_t n = detail::random_size(rng, 2, 8);
    auto g = detail::random_graph(rng, n);
    auto ws = detail::random_double_weights(rng, g);
    FloorCheck f = min_entry_floor_report(ws, explicit_schedule(g, detail::random_edges(rng, *g, 500)));
    violations += f.violations;
    if (f.smallest == f.floor) {
      ++ties;
      largest_tie_n = std::max(largest_tie_n, n);
    }
    tightest = std::min(tightest, f.smallest / f.floor);
  }
  CheckResult out{8, "min-entry floor", violations == 0, "", 0.0};
  out.detail = std::to_string(violations) + " violations of min P >= eps over 100 runs; smallest min P / eps = " +
               detail::fmt("%.6g", tightest) + " (" + std::to_string(ties) + " runs attain equality, all with n <= " +
               std::to_string(largest_tie_n) + ")";
  return out;
}

inline CheckResult scrambling_and_contraction() {
  Rng rng = make_rng(9);
  std::size_t scrambling_fail = 0, mu_fail = 0, contraction_fail = 0;
  for (int k = 0; k < 200; ++k) {
    std::size_t n = detail::random_size(rng, 2, 8);
    auto g = detail::random_graph(rng, n);
    auto ws = detail::random_double_weights(rng, g);
    EdgeSequence seq;
    for (std::size_t s = 0; s < std::max<std::size_t>(1, n / 2); ++s) {
      EdgeSequence piece = detail::random_spanning_string(rng, *g);
      seq.insert(seq.end(), piece.begin(), piece.end());
    }
    Matrix<double> p = detail::dense_product(ws, seq);
    if (!is_scrambling(p)) ++scrambling_fail;
    else if (ergodicity(p) > 1.0 - min_entry(p) + kInequalitySlack) ++mu_fail;
  }
  for (int k = 0; k < 1000; ++k) {
    std::size_t n = detail::random_size(rng, 2, 6);
    auto g = detail::random_graph(rng, n);
    auto ws = detail::random_double_weights(rng, g);
    Matrix<double> p = detail::dense_product(ws, detail::random_edges(rng, *g, 1 + uniform_index(rng, 12)));
    Matrix<double> q = detail::dense_product(ws, detail::random_edges(rng, *g, 1 + uniform_index(rng, 12)));
    if (seminorm(p * q) > ergodicity(p) * seminorm(q) + kInequalitySlack) ++contraction_fail;
  }
  CheckResult out{9, "scrambling and contraction", scrambling_fail + mu_fail + contraction_fail == 0, "", 0.0};
  out.detail = std::to_string(scrambling_fail) + " non-scrambling, " + std::to_string(mu_fail) +
               " mu > 1 - min over 200 products; " + std::to_string(contraction_fail) +
               " contraction violations over 1000 pairs";
  return out;
}

inline CheckResult structural_update() {
  Rng rng = make_rng(10);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    std::size_t n = detail::random_size(rng, 2, 5);
    auto g = detail::random_graph(rng, n);
    auto ws = detail::random_double_weights(rng, g);
    EdgeSequence seq = detail::random_edges(rng, *g, 20);
    ProductTracker tracker(n);
    for (EdgeId id : seq) tracker.step(ws, id);
    Matrix<double> dense = detail::dense_product(ws, seq);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) worst = std::max(worst, std::abs(dense(r, c) - tracker.product()(r, c)));
  }
  CheckResult out{10, "structural update", worst <= kDenseTol, "", 0.0};
  out.detail = detail::fmt("100 runs of 20 steps, max |P - P_dense| = %.3g", worst);
  return out;
}

inline const std::vector<std::function<CheckResult()>>& all_checks() {
  static const std::vector<std::function<CheckResult()>> checks{
      limit_correctness,  order_independence, exponential_bound, holonomy_necessity,
      inverse_design,     fiber_property,     eigenvector_characterization,
      min_entry_floor,    scrambling_and_contraction, structural_update};
  return checks;
}

/// Runs one check, turning an escaped exception into a failure.
inline CheckResult run_check(const std::function<CheckResult()>& check, int id) {
  auto start = std::chrono::steady_clock::now();
  CheckResult out;
  try {
    out = check();
  } catch (const std::exception& ex) {
    out = CheckResult{id, "check " + std::to_string(id), false, std::string("exception: ") + ex.what(), 0.0};
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

/// All checks, optionally in parallel; results always come back in id order.
inline std::vector<CheckResult> run_all(bool parallel = true) {
  const auto& checks = all_checks();
  std::vector<CheckResult> out;
  if (!parallel) {
    for (std::size_t k = 0; k < checks.size(); ++k) out.push_back(run_check(checks[k], static_cast<int>(k + 1)));
    return out;
  }
  std::vector<std::future<CheckResult>> pending;
  for (std::size_t k = 0; k < checks.size(); ++k)
    pending.push_back(std::async(std::launch::async, run_check, checks[k], static_cast<int>(k + 1)));
  for (auto& f : pending) out.push_back(f.get());
  return out;
}

inline std::string format_result(const CheckResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "[%s] %2d %-30s ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str());
  return std::string(head) + r.detail;
}

}  // namespace hologossip::verification
