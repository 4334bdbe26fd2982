#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graph.hpp"
#include "weights.hpp"

namespace hologossip {

inline constexpr double kEigenvectorTolerance = 1e-12;

/// Strictly positive vector whose entries sum to one.
template <Scalar T>
struct ProbabilityVector {
  std::vector<T> entries;

  std::size_t size() const { return entries.size(); }
  const T& operator[](std::size_t i) const { return entries[i]; }

  friend bool operator==(const ProbabilityVector&, const ProbabilityVector&) = default;
};

/// Unnormalized vector q with q[base] == 1.
template <Scalar T>
struct Potential {
  std::vector<T> entries;
  Node base = 0;
};

template <Scalar T>
struct ConsensusLimit {
  Potential<T> potential;
  ProbabilityVector<T> probability;
};

/// Rejects vectors with a nonpositive entry; checks the unit sum exactly for
/// rationals and to `tol` for floats.
template <Scalar T>
ProbabilityVector<T> make_probability_vector(std::vector<T> entries, double tol = 1e-12) {
  T sum(0);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!(entries[i] > T(0)))
      throw Error(Errc::non_interior_vector, "entry " + std::to_string(i + 1) + " is not positive");
    sum += entries[i];
  }
  if (!near_equal(sum, T(1), tol)) throw Error(Errc::non_interior_vector, "entries sum to " + to_string(sum));
  return ProbabilityVector<T>{std::move(entries)};
}

template <Scalar T>
ProbabilityVector<T> normalize(const std::vector<T>& q) {
  T sum(0);
  for (const T& v : q) sum += v;
  std::vector<T> p;
  p.reserve(q.size());
  for (const T& v : q) p.push_back(v / sum);
  return ProbabilityVector<T>{std::move(p)};
}

namespace detail {

/// Propagates q along a rooted tree: q[root] = 1 and
/// q[child] = q[parent] * edge_ratio(parent, child).
template <Scalar T>
std::vector<T> propagate_potential(const SpanningTree& t, const std::function<T(Node, Node)>& edge_ratio) {
  const std::size_t n = t.parent.size();
  std::vector<Node> order(n);
  for (Node v = 0; v < n; ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](Node a, Node b) { return t.depth[a] < t.depth[b]; });
  std::vector<T> q(n, T(0));
  q[t.root] = T(1);
  for (Node v : order)
    if (v != t.root) q[v] = q[t.parent[v]] * edge_ratio(t.parent[v], v);
  return q;
}

}  // namespace detail

/// Probability vector attached to a spanning tree: the unique p with
/// p^T A_ij = p^T for every tree edge. Always defined.
template <Scalar T>
ProbabilityVector<T> tree_vector(const WeightSet<T>& ws, const SpanningTree& t) {
  auto q = detail::propagate_potential<T>(t, [&](Node a, Node b) { return ratio(ws, a, b); });
  return normalize(q);
}

/// Consensus limit of a holonomic weight set: q_i = R_w along the BFS-tree
/// path from `base` to node i, then p = q / sum(q). The result does not depend
/// on `base`.
template <Scalar T>
ConsensusLimit<T> consensus_limit(const WeightSet<T>& ws, Node base = 0, double eta = kHolonomyTolerance) {
  auto report = check_holonomy(ws, eta);
  if (!report.holonomic)
    throw Error(Errc::not_holonomic, "cycle " + format_walk(report.witness->cycle) +
                                         " has ratio product " + to_string(report.witness->value));
  SpanningTree t = spanning_tree(ws.graph(), base);
  auto q = detail::propagate_potential<T>(t, [&](Node a, Node b) { return ratio(ws, a, b); });
  ConsensusLimit<T> out;
  out.probability = normalize(q);
  out.potential = Potential<T>{std::move(q), base};
  return out;
}

/// Maximum over edges and both block coordinates of |(p^T A_ij)_k - p_k|.
template <Scalar T>
T left_eigenvector_residual(const WeightSet<T>& ws, const std::vector<T>& p) {
  if (p.size() != ws.node_count()) throw Error(Errc::mismatched_node_counts, "vector length differs from n");
  T worst(0);
  for (EdgeId id = 0; id < ws.graph().edge_count(); ++id) {
    const Edge& e = ws.graph().edge(id);
    const auto& w = ws.edge_weights(id);
    T first = (T(1) - w.a_ij) * p[e.u] + w.a_ji * p[e.v];
    T second = w.a_ij * p[e.u] + (T(1) - w.a_ji) * p[e.v];
    T d1 = first - p[e.u];
    T d2 = second - p[e.v];
    if (d1 < T(0)) d1 = -d1;
    if (d2 < T(0)) d2 = -d2;
    if (d1 > worst) worst = d1;
    if (d2 > worst) worst = d2;
  }
  return worst;
}

/// p^T A_ij == p^T for every edge (exactly for rationals, within `tol` for
/// floats).
template <Scalar T>
bool verify_left_eigenvector(const WeightSet<T>& ws, const std::vector<T>& p, double tol = kEigenvectorTolerance) {
  T residual = left_eigenvector_residual(ws, p);
  if constexpr (ScalarTraits<T>::exact) {
    return residual == T(0);
  } else {
    return residual <= tol;
  }
}

template <Scalar T>
bool verify_left_eigenvector(const WeightSet<T>& ws, const ProbabilityVector<T>& p,
                             double tol = kEigenvectorTolerance) {
  return verify_left_eigenvector(ws, p.entries, tol);
}

template <Scalar T>
struct WitnessTrees {
  /// Tree holding the path edges of the violated cycle.
  SpanningTree path_tree;
  /// Tree holding the cycle's closing edge.
  SpanningTree closing_tree;
  ProbabilityVector<T> path_vector;
  ProbabilityVector<T> closing_vector;
  /// The violated cycle, rotated to start at its smallest node.
  Walk cycle;
};

/// Rotates a closed walk to start at its smallest node and orients it toward
/// the smaller of that node's two cycle neighbors.
inline Walk canonical_cycle(const Walk& cycle) {
  std::vector<Node> ring(cycle.nodes.begin(), cycle.nodes.end() - 1);
  auto start = std::min_element(ring.begin(), ring.end()) - ring.begin();
  std::rotate(ring.begin(), ring.begin() + start, ring.end());
  if (ring.size() > 2 && ring.back() < ring[1]) std::reverse(ring.begin() + 1, ring.end());
  ring.push_back(ring.front());
  return Walk{std::move(ring)};
}

/// For a non-holonomic set, two spanning trees whose tree vectors differ: one
/// contains the path v1 ... vk of a violated cycle, the other its closing edge
/// (v1, vk). Empty when the set is holonomic.
template <Scalar T>
std::optional<WitnessTrees<T>> nonholonomy_witness_trees(const WeightSet<T>& ws, double eta = kHolonomyTolerance) {
  auto report = check_holonomy(ws, eta);
  if (report.holonomic) return std::nullopt;
  const Graph& g = ws.graph();
  Walk cycle = canonical_cycle(report.witness->cycle);
  const auto& nodes = cycle.nodes;
  std::vector<EdgeId> path_edges;
  for (std::size_t k = 0; k + 2 < nodes.size(); ++k) path_edges.push_back(g.edge_id(nodes[k], nodes[k + 1]));
  EdgeId closing = g.edge_id(nodes[nodes.size() - 2], nodes.front());

  WitnessTrees<T> out;
  out.path_tree = complete_spanning_tree(g, path_edges);
  out.closing_tree = complete_spanning_tree(g, {closing});
  out.path_vector = tree_vector(ws, out.path_tree);
  out.closing_vector = tree_vector(ws, out.closing_tree);
  out.cycle = std::move(cycle);
  return out;
}

}  // namespace hologossip
