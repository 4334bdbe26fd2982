#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "limit.hpp"
#include "random.hpp"
#include "weights.hpp"

namespace hologossip {

/// Per-edge ratios over the directed edges: `forward[id]` is y_uv and
/// `backward[id]` is y_vu for the stored edge (u, v).
template <Scalar T>
struct RatioVector {
  GraphPtr graph;
  std::vector<T> forward;
  std::vector<T> backward;

  /// y_ij for an edge in either orientation.
  const T& at(Node i, Node j) const {
    EdgeId id = graph->edge_id(i, j);
    return graph->edge(id).u == i ? forward[id] : backward[id];
  }

  friend bool operator==(const RatioVector& a, const RatioVector& b) {
    return *a.graph == *b.graph && a.forward == b.forward && a.backward == b.backward;
  }
};

/// Per-edge segment parameter, strictly inside (0, 1).
template <Scalar T>
struct BoxPoint {
  std::vector<T> x;
};

/// (a_ij, a_ji) -> (a_ij / a_ji) on every directed edge.
template <Scalar T>
RatioVector<T> phi(const WeightSet<T>& ws) {
  RatioVector<T> y{ws.graph_ptr(), {}, {}};
  for (const auto& w : ws.all()) {
    y.forward.push_back(w.a_ij / w.a_ji);
    y.backward.push_back(w.a_ji / w.a_ij);
  }
  return y;
}

/// p -> (p_j / p_i) on every directed edge i→j.
template <Scalar T>
RatioVector<T> theta(const ProbabilityVector<T>& p, const GraphPtr& g) {
  if (p.size() != g->node_count()) throw Error(Errc::mismatched_node_counts, "target length differs from n");
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!(p[i] > T(0))) throw Error(Errc::non_interior_vector, "entry " + std::to_string(i + 1) + " is not positive");
  RatioVector<T> y{g, {}, {}};
  for (const Edge& e : g->edges()) {
    y.forward.push_back(p[e.v] / p[e.u]);
    y.backward.push_back(p[e.u] / p[e.v]);
  }
  return y;
}

namespace detail {

template <Scalar T>
void require_reciprocal(const RatioVector<T>& y, double tol) {
  if (y.forward.size() != y.graph->edge_count() || y.backward.size() != y.graph->edge_count())
    throw Error(Errc::invalid_ratio, "ratio vector size differs from edge count");
  for (EdgeId id = 0; id < y.forward.size(); ++id) {
    if (!(y.forward[id] > T(0)) || !(y.backward[id] > T(0)))
      throw Error(Errc::invalid_ratio, "ratios must be positive");
    if (!is_unit(T(y.forward[id] * y.backward[id]), tol))
      throw Error(Errc::invalid_ratio, "y_ij * y_ji != 1 on edge " + std::to_string(id + 1));
  }
}

}  // namespace detail

/// Inverse of theta on balanced ratio vectors, by running the consensus-limit
/// construction with y in place of r.
template <Scalar T>
ProbabilityVector<T> theta_inverse(const RatioVector<T>& y, double eta = kHolonomyTolerance) {
  detail::require_reciprocal(y, eta);
  const Graph& g = *y.graph;
  SpanningTree t = spanning_tree(g, 0);
  for (const Walk& cycle : fundamental_cycles(g, t)) {
    T product(1);
    for (std::size_t k = 0; k + 1 < cycle.nodes.size(); ++k) product *= y.at(cycle.nodes[k], cycle.nodes[k + 1]);
    if (!is_unit(product, eta))
      throw Error(Errc::not_balanced, "cycle " + format_walk(cycle) + " has product " + to_string(product));
  }
  auto q = detail::propagate_potential<T>(t, [&](Node a, Node b) { return y.at(a, b); });
  return normalize(q);
}

/// Point of the open segment phi^{-1}(y) selected by x, per edge:
/// (a_ij, a_ji) = (r x, x) when r <= 1, else (x, x / r).
template <Scalar T>
WeightSet<T> preimage_point(const RatioVector<T>& y, const BoxPoint<T>& x, double tol = kHolonomyTolerance) {
  detail::require_reciprocal(y, tol);
  if (x.x.size() != y.graph->edge_count())
    throw Error(Errc::parameter_out_of_range, "expected one box parameter per edge");
  std::vector<EdgeWeights<T>> weights;
  weights.reserve(x.x.size());
  for (EdgeId id = 0; id < x.x.size(); ++id) {
    const T& xe = x.x[id];
    if (!(xe > T(0) && xe < T(1)))
      throw Error(Errc::parameter_out_of_range, "box parameter " + to_string(xe) + " on edge " +
                                                    std::to_string(id + 1) + " is outside (0,1)");
    const T& r = y.forward[id];
    if (r <= T(1)) {
      weights.push_back({r * xe, xe});
    } else {
      weights.push_back({xe, xe / r});
    }
  }
  return WeightSet<T>(y.graph, std::move(weights));
}

/// Holonomic weights on g whose consensus limit is p.
template <Scalar T>
WeightSet<T> design_for(const ProbabilityVector<T>& p, const GraphPtr& g, const BoxPoint<T>& x) {
  return preimage_point(theta(p, g), x);
}

inline constexpr double kBoxMargin = 1e-6;

/// Seeded box point on a grid of step `margin`: x = k * margin with k uniform
/// in [1, 1/margin - 1], so every coordinate lies in [margin, 1 - margin] and
/// stays exactly representable as a short rational.
template <Scalar T>
BoxPoint<T> sample_box_point(const Graph& g, std::uint64_t seed, double margin = kBoxMargin) {
  const auto steps = static_cast<std::uint64_t>(1.0 / margin + 0.5);
  Rng rng = make_rng(seed);
  BoxPoint<T> out;
  out.x.reserve(g.edge_count());
  for (EdgeId id = 0; id < g.edge_count(); ++id) {
    std::uint64_t k = 1 + uniform_index(rng, steps - 1);
    if constexpr (ScalarTraits<T>::exact) {
      out.x.push_back(Rational(k, steps));
    } else {
      out.x.push_back(static_cast<double>(k) / static_cast<double>(steps));
    }
  }
  return out;
}

}  // namespace hologossip
