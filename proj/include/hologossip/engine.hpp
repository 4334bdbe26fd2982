#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "graph.hpp"
#include "limit.hpp"
#include "matrix.hpp"
#include "random.hpp"
#include "union_find.hpp"
#include "weights.hpp"

namespace hologossip {

// ---------------------------------------------------------------------------
// Matrix diagnostics
// ---------------------------------------------------------------------------

/// ||M||_S: the largest spread within any column.
template <class T>
T seminorm(const Matrix<T>& m) {
  T best(0);
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (m.rows() == 0) break;
    T lo = m(0, c), hi = m(0, c);
    for (std::size_t r = 1; r < m.rows(); ++r) {
      lo = std::min(lo, m(r, c));
      hi = std::max(hi, m(r, c));
    }
    best = std::max(best, T(hi - lo));
  }
  return best;
}

/// Smallest nonzero entry (1 for an all-zero matrix, which never occurs for
/// stochastic input).
template <class T>
T min_entry(const Matrix<T>& m) {
  std::optional<T> best;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (const T& v : m.row(r))
      if (v != T(0) && (!best || v < *best)) best = v;
  return best.value_or(T(1));
}

inline constexpr double kStochasticTolerance = 1e-12;

template <class T>
bool is_stochastic(const Matrix<T>& m, double tol = kStochasticTolerance) {
  if (m.rows() != m.cols()) return false;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    T sum(0);
    for (const T& v : m.row(r)) {
      if (v < T(0)) return false;
      sum += v;
    }
    if (std::abs(to_double(T(sum - T(1)))) > tol) return false;
  }
  return true;
}

/// Coefficient of ergodicity: half the largest L1 distance between two rows.
inline double ergodicity(const Matrix<double>& m) {
  if (!is_stochastic(m)) throw Error(Errc::not_stochastic, "ergodicity needs a row-stochastic matrix");
  double best = 0.0;
  for (std::size_t a = 0; a < m.rows(); ++a)
    for (std::size_t b = a + 1; b < m.rows(); ++b) {
      double l1 = 0.0;
      for (std::size_t k = 0; k < m.cols(); ++k) l1 += std::abs(m(a, k) - m(b, k));
      best = std::max(best, 0.5 * l1);
    }
  return best;
}

/// No two rows are orthogonal, i.e. every row pair shares a positive column.
template <class T>
bool is_scrambling(const Matrix<T>& m) {
  for (std::size_t a = 0; a < m.rows(); ++a)
    for (std::size_t b = a + 1; b < m.rows(); ++b) {
      bool shared = false;
      for (std::size_t k = 0; k < m.cols() && !shared; ++k) shared = m(a, k) > T(0) && m(b, k) > T(0);
      if (!shared) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Updates
// ---------------------------------------------------------------------------

/// In-place gossip on the stored edge (e.u, e.v):
///   x_u' = (1 - a_ij) x_u + a_ij x_v,  x_v' = a_ji x_u + (1 - a_ji) x_v.
inline void gossip_step(std::span<double> x, const Edge& e, const EdgeWeights<double>& w) {
  const double xu = x[e.u];
  const double xv = x[e.v];
  x[e.u] = (1.0 - w.a_ij) * xu + w.a_ij * xv;
  x[e.v] = w.a_ji * xu + (1.0 - w.a_ji) * xv;
}

/// Gossip between neighbors i and j using the weights stored in `ws`.
inline std::vector<double> gossip_step(const WeightSet<double>& ws, std::vector<double> x, Node i, Node j) {
  if (x.size() != ws.node_count()) throw Error(Errc::mismatched_node_counts, "state length differs from n");
  EdgeId id = ws.graph().edge_id(i, j);
  gossip_step(x, ws.graph().edge(id), ws.edge_weights(id));
  return x;
}

/// Running product P(t:0) = A_{e_t} ... A_{e_1}, starting from the identity.
/// Left-multiplying by A_e only rewrites rows u and v, so each step is O(n).
template <class T>
class BasicProductTracker {
 public:
  explicit BasicProductTracker(std::size_t n) : product_(Matrix<T>::identity(n)) {}

  void step(const Edge& e, const T& a_ij, const T& a_ji) {
    auto ru = product_.row(e.u);
    auto rv = product_.row(e.v);
    for (std::size_t k = 0; k < ru.size(); ++k) {
      const T pu = ru[k];
      const T pv = rv[k];
      ru[k] = (T(1) - a_ij) * pu + a_ij * pv;
      rv[k] = a_ji * pu + (T(1) - a_ji) * pv;
    }
    ++steps_;
  }

  const Matrix<T>& product() const { return product_; }
  std::size_t steps() const { return steps_; }
  T seminorm() const { return hologossip::seminorm(product_); }
  T min_entry() const { return hologossip::min_entry(product_); }

 private:
  Matrix<T> product_;
  std::size_t steps_ = 0;
};

class ProductTracker : public BasicProductTracker<double> {
 public:
  using BasicProductTracker<double>::BasicProductTracker;
  using BasicProductTracker<double>::step;
  void step(const Edge& e, const EdgeWeights<double>& w) { step(e, w.a_ij, w.a_ji); }
  void step(const WeightSet<double>& ws, EdgeId id) { step(ws.graph().edge(id), ws.edge_weights(id)); }
};

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

enum class ScheduleKind { explicit_list, periodic, random };

inline const char* schedule_kind_name(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::explicit_list: return "explicit";
    case ScheduleKind::periodic: return "periodic";
    case ScheduleKind::random: return "random";
  }
  return "unknown";
}

/// A finite gossip schedule over one graph. Random schedules draw edges
/// uniformly from E with the library Rng seeded by `seed`.
struct Schedule {
  ScheduleKind kind = ScheduleKind::explicit_list;
  GraphPtr graph;
  /// Explicit list, or one period.
  EdgeSequence edges;
  std::size_t repetitions = 1;
  std::uint64_t seed = 0;
  std::size_t steps = 0;

  std::size_t length() const {
    switch (kind) {
      case ScheduleKind::explicit_list: return edges.size();
      case ScheduleKind::periodic: return edges.size() * repetitions;
      case ScheduleKind::random: return steps;
    }
    return 0;
  }
};

namespace detail {
inline void check_edges(const Graph& g, const EdgeSequence& edges) {
  for (EdgeId id : edges)
    if (id >= g.edge_count()) throw Error(Errc::invalid_schedule, "schedule edge id out of range");
}
}  // namespace detail

inline Schedule explicit_schedule(GraphPtr g, EdgeSequence edges) {
  detail::check_edges(*g, edges);
  return Schedule{ScheduleKind::explicit_list, std::move(g), std::move(edges), 1, 0, 0};
}

inline Schedule periodic_schedule(GraphPtr g, EdgeSequence period, std::size_t repetitions) {
  if (period.empty()) throw Error(Errc::invalid_schedule, "period must be nonempty");
  detail::check_edges(*g, period);
  return Schedule{ScheduleKind::periodic, std::move(g), std::move(period), repetitions, 0, 0};
}

inline Schedule random_schedule(GraphPtr g, std::uint64_t seed, std::size_t steps) {
  if (steps == 0) throw Error(Errc::invalid_schedule, "step count must be at least 1");
  return Schedule{ScheduleKind::random, std::move(g), {}, 1, seed, steps};
}

/// Generates the edges of a schedule one at a time.
class ScheduleCursor {
 public:
  explicit ScheduleCursor(const Schedule& s) : schedule_(&s), rng_(make_rng(s.seed)) {}

  std::optional<EdgeId> next() {
    if (position_ >= schedule_->length()) return std::nullopt;
    std::size_t k = position_++;
    switch (schedule_->kind) {
      case ScheduleKind::explicit_list: return schedule_->edges[k];
      case ScheduleKind::periodic: return schedule_->edges[k % schedule_->edges.size()];
      case ScheduleKind::random: return static_cast<EdgeId>(uniform_index(rng_, schedule_->graph->edge_count()));
    }
    return std::nullopt;
  }

 private:
  const Schedule* schedule_;
  Rng rng_;
  std::size_t position_ = 0;
};

inline EdgeSequence materialize(const Schedule& s) {
  EdgeSequence out;
  out.reserve(s.length());
  ScheduleCursor cursor(s);
  while (auto e = cursor.next()) out.push_back(*e);
  return out;
}

struct ScheduleClass {
  bool spanning = false;
  /// Smallest m with every length-m window spanning; periodic schedules only.
  std::optional<std::size_t> m_spanning;
  /// Random schedules are spanning with probability one; not decided here.
  bool probabilistic = false;
};

/// Spanning / m-spanning classification.
///
/// Periodic: spanning iff one period covers a spanning tree; m is the
/// smallest window length (up to twice the period) such that every window of
/// the periodic extension is spanning.
inline ScheduleClass classify_schedule(const Schedule& s) {
  const Graph& g = *s.graph;
  ScheduleClass out;
  switch (s.kind) {
    case ScheduleKind::explicit_list:
      out.spanning = is_spanning(g, s.edges);
      break;
    case ScheduleKind::random:
      out.spanning = true;
      out.probabilistic = true;
      break;
    case ScheduleKind::periodic: {
      out.spanning = is_spanning(g, s.edges);
      if (!out.spanning) break;
      const std::size_t period = s.edges.size();
      for (std::size_t m = 1; m <= 2 * period && !out.m_spanning; ++m) {
        bool all = true;
        for (std::size_t start = 0; start < period && all; ++start) {
          UnionFind uf(g.node_count());
          for (std::size_t k = 0; k < m; ++k) {
            const Edge& e = g.edge(s.edges[(start + k) % period]);
            uf.unite(e.u, e.v);
          }
          all = uf.components() == 1;
        }
        if (all) out.m_spanning = m;
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

inline constexpr double kConvergenceTolerance = 1e-10;

struct RunOptions {
  /// Stop once ||P||_S drops below tol. Zero disables early stopping.
  double tol = kConvergenceTolerance;
  /// Optional initial agent states to evolve alongside the product.
  std::optional<std::vector<double>> initial_state;
  /// Hard cap on steps regardless of schedule length.
  std::optional<std::size_t> max_steps;
};

struct TraceRow {
  std::size_t t = 0;
  std::optional<EdgeId> edge;
  double seminorm = 0.0;
  std::optional<double> bound;
  double min_entry = 0.0;
};

struct RunReport {
  Matrix<double> product;
  /// Column means of the final product.
  std::vector<double> limit;
  std::size_t steps = 0;
  bool converged = false;
  double final_seminorm = 0.0;
  std::vector<TraceRow> trace;
  ScheduleKind schedule_kind = ScheduleKind::explicit_list;
  std::optional<std::size_t> m_spanning;
  double epsilon = 0.0;
  /// max(seminorm - bound) over recorded rows; present when m is known.
  std::optional<double> max_bound_violation;
  std::size_t bound_violations = 0;
  std::optional<std::vector<double>> final_state;
};

/// Rows are recorded every step up to t = 1000, then every 100 steps; the
/// final step is always recorded.
inline bool should_record(std::size_t t) { return t <= 1000 || t % 100 == 0; }

/// (1 - eps)^(t / (m floor(n/2)) - 1).
inline double convergence_bound(double eps, std::size_t m, std::size_t n, std::size_t t) {
  const double window = static_cast<double>(m * (n / 2));
  return std::pow(1.0 - eps, static_cast<double>(t) / window - 1.0);
}

inline std::vector<double> column_means(const Matrix<double>& m) {
  std::vector<double> out(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] += m(r, c);
  for (double& v : out) v /= static_cast<double>(m.rows());
  return out;
}

/// Steps the running product through the schedule. The bound ledger is kept
/// whenever the schedule is m-spanning for a known m.
inline RunReport run(const WeightSet<double>& ws, const Schedule& s, const RunOptions& opts = {}) {
  if (!s.graph || !(*s.graph == ws.graph()))
    throw Error(Errc::graph_mismatch, "schedule and weights are defined on different graphs");
  const std::size_t n = ws.node_count();
  const ScheduleClass cls = classify_schedule(s);

  RunReport report;
  report.schedule_kind = s.kind;
  report.m_spanning = cls.m_spanning;
  report.epsilon = epsilon(ws);

  std::optional<std::vector<double>> state = opts.initial_state;
  if (state && state->size() != n) throw Error(Errc::mismatched_node_counts, "initial state length differs from n");

  ProductTracker tracker(n);
  auto record = [&](std::optional<EdgeId> edge, double norm) {
    TraceRow row{tracker.steps(), edge, norm, std::nullopt, tracker.min_entry()};
    if (report.m_spanning) {
      row.bound = convergence_bound(report.epsilon, *report.m_spanning, n, row.t);
      double violation = norm - *row.bound;
      report.max_bound_violation =
          report.max_bound_violation ? std::max(*report.max_bound_violation, violation) : violation;
      if (violation > 0.0) ++report.bound_violations;
    }
    report.trace.push_back(row);
  };

  double norm = tracker.seminorm();
  record(std::nullopt, norm);
  const std::size_t budget = opts.max_steps ? std::min(*opts.max_steps, s.length()) : s.length();
  ScheduleCursor cursor(s);
  while (tracker.steps() < budget && !(opts.tol > 0.0 && norm < opts.tol)) {
    EdgeId id = *cursor.next();
    const Edge& e = ws.graph().edge(id);
    tracker.step(e, ws.edge_weights(id));
    if (state) gossip_step(*state, e, ws.edge_weights(id));
    norm = tracker.seminorm();
    const bool last = tracker.steps() == budget || (opts.tol > 0.0 && norm < opts.tol);
    if (should_record(tracker.steps()) || last) record(id, norm);
  }

  report.product = tracker.product();
  report.limit = column_means(report.product);
  report.steps = tracker.steps();
  report.final_seminorm = norm;
  report.converged = opts.tol > 0.0 ? norm < opts.tol : norm == 0.0;
  report.final_state = std::move(state);
  return report;
}

/// Runs each schedule on its own thread with isolated state; results come
/// back in input order.
inline std::vector<RunReport> run_batch(const WeightSet<double>& ws, const std::vector<Schedule>& schedules,
                                        const RunOptions& opts = {}) {
  std::vector<std::future<RunReport>> pending;
  pending.reserve(schedules.size());
  for (const Schedule& s : schedules)
    pending.push_back(std::async(std::launch::async, [&ws, &s, &opts] { return run(ws, s, opts); }));
  std::vector<RunReport> out;
  out.reserve(pending.size());
  for (auto& f : pending) out.push_back(f.get());
  return out;
}

/// 100 significant decimal digits. Used where binary64 roundoff (about 1e-16)
/// would swamp the quantity being checked.
using Extended = boost::multiprecision::cpp_bin_float_100;

template <Scalar T>
Extended to_extended(const T& v) {
  if constexpr (ScalarTraits<T>::exact) {
    return Extended(boost::multiprecision::numerator(v)) / Extended(boost::multiprecision::denominator(v));
  } else {
    return Extended(v);
  }
}

struct BoundLedger {
  std::size_t m = 0;
  double epsilon = 0.0;
  std::size_t rows = 0;
  std::size_t last_t = 0;
  std::size_t violations = 0;
  /// max(seminorm - bound) over recorded rows.
  double max_violation = 0.0;
};

/// The convergence-bound ledger of run(), with the product kept in Extended
/// precision. The bound falls to about 1e-89 by t = 10^4 on small graphs,
/// far below what binary64 can resolve, so long runs need this to say
/// anything about the exact product. Throws InvalidSchedule when the schedule
/// is not m-spanning.
template <Scalar T>
BoundLedger extended_bound_ledger(const WeightSet<T>& ws, const Schedule& s,
                                  std::optional<std::size_t> max_steps = std::nullopt) {
  if (!s.graph || !(*s.graph == ws.graph()))
    throw Error(Errc::graph_mismatch, "schedule and weights are defined on different graphs");
  const ScheduleClass cls = classify_schedule(s);
  if (!cls.m_spanning) throw Error(Errc::invalid_schedule, "the bound needs an m-spanning schedule");
  const std::size_t n = ws.node_count();
  BoundLedger out;
  out.m = *cls.m_spanning;
  out.epsilon = to_double(epsilon(ws));

  std::vector<std::pair<Extended, Extended>> weights;
  for (const auto& w : ws.all()) weights.emplace_back(to_extended(w.a_ij), to_extended(w.a_ji));

  BasicProductTracker<Extended> tracker(n);
  auto record = [&] {
    double norm = tracker.seminorm().template convert_to<double>();
    double violation = norm - convergence_bound(out.epsilon, out.m, n, tracker.steps());
    out.max_violation = out.rows == 0 ? violation : std::max(out.max_violation, violation);
    if (violation > 0.0) ++out.violations;
    out.last_t = tracker.steps();
    ++out.rows;
  };
  record();
  const std::size_t budget = max_steps ? std::min(*max_steps, s.length()) : s.length();
  ScheduleCursor cursor(s);
  while (tracker.steps() < budget) {
    EdgeId id = *cursor.next();
    tracker.step(ws.graph().edge(id), weights[id].first, weights[id].second);
    if (should_record(tracker.steps()) || tracker.steps() == budget) record();
  }
  return out;
}

struct FloorCheck {
  bool holds = true;
  double floor = 0.0;
  double smallest = 1.0;
  std::size_t violations = 0;
  std::size_t first_violation = npos;
};

/// Scans every prefix product (the empty prefix included) and compares its
/// smallest nonzero entry to epsilon = min_weight^(n-1). The floor is met with
/// equality on two-node graphs, so the check is min P >= epsilon.
inline FloorCheck min_entry_floor_report(const WeightSet<double>& ws, const Schedule& s) {
  FloorCheck out;
  out.floor = epsilon(ws);
  ProductTracker tracker(ws.node_count());
  auto inspect = [&] {
    double m = tracker.min_entry();
    out.smallest = std::min(out.smallest, m);
    if (m < out.floor) {
      if (out.violations++ == 0) out.first_violation = tracker.steps();
      out.holds = false;
    }
  };
  inspect();
  ScheduleCursor cursor(s);
  while (auto id = cursor.next()) {
    tracker.step(ws, *id);
    inspect();
  }
  return out;
}

inline bool min_entry_floor_check(const WeightSet<double>& ws, const Schedule& s) {
  return min_entry_floor_report(ws, s).holds;
}

}  // namespace hologossip
