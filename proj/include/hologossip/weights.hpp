#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graph.hpp"
#include "matrix.hpp"
#include "scalar.hpp"

namespace hologossip {

/// Relative tolerance used to decide R_C == 1 for floating-point weights.
inline constexpr double kHolonomyTolerance = 1e-9;

/// The 2x2 block of one local stochastic matrix, oriented by the stored
/// edge (u, v) with u < v: `a_ij` is the weight agent u places on v's value
/// and `a_ji` the weight v places on u's value.
///
///   x_u' = (1 - a_ij) x_u + a_ij x_v
///   x_v' = a_ji x_u + (1 - a_ji) x_v
template <Scalar T>
struct EdgeWeights {
  T a_ij;
  T a_ji;

  friend bool operator==(const EdgeWeights&, const EdgeWeights&) = default;
};

/// One EdgeWeights per graph edge, indexed by EdgeId. Immutable once built;
/// every weight lies strictly inside (0, 1).
template <Scalar T>
class WeightSet {
 public:
  using scalar_type = T;

  WeightSet(GraphPtr graph, std::vector<EdgeWeights<T>> weights)
      : graph_(std::move(graph)), weights_(std::move(weights)) {
    if (!graph_) throw Error(Errc::graph_mismatch, "weight set without a graph");
    if (weights_.size() != graph_->edge_count())
      throw Error(Errc::invalid_weight, "expected " + std::to_string(graph_->edge_count()) +
                                            " edge weights, got " + std::to_string(weights_.size()));
    for (EdgeId id = 0; id < weights_.size(); ++id) {
      for (const T& a : {weights_[id].a_ij, weights_[id].a_ji}) {
        if (!(a > T(0) && a < T(1))) {
          const Edge& e = graph_->edge(id);
          throw Error(Errc::invalid_weight, "weight " + to_string(a) + " on edge (" + std::to_string(e.u + 1) +
                                                "," + std::to_string(e.v + 1) + ") is outside (0,1)");
        }
      }
    }
  }

  const Graph& graph() const { return *graph_; }
  const GraphPtr& graph_ptr() const { return graph_; }
  std::size_t node_count() const { return graph_->node_count(); }

  const EdgeWeights<T>& edge_weights(EdgeId id) const { return weights_.at(id); }
  const std::vector<EdgeWeights<T>>& all() const { return weights_; }

  /// Weight agent i places on neighbor j's value.
  const T& weight(Node i, Node j) const {
    EdgeId id = graph_->edge_id(i, j);
    const auto& w = weights_[id];
    return graph_->edge(id).u == i ? w.a_ij : w.a_ji;
  }

 private:
  GraphPtr graph_;
  std::vector<EdgeWeights<T>> weights_;
};

template <Scalar To, Scalar From>
WeightSet<To> convert_weights(const WeightSet<From>& ws) {
  std::vector<EdgeWeights<To>> out;
  out.reserve(ws.all().size());
  for (const auto& w : ws.all()) out.push_back({scalar_cast<To>(w.a_ij), scalar_cast<To>(w.a_ji)});
  return WeightSet<To>(ws.graph_ptr(), std::move(out));
}

/// Local stochastic matrix A_ij: identity except the 2x2 block at rows and
/// columns {i, j}. A_ij == A_ji.
template <Scalar T>
Matrix<T> local_matrix(const WeightSet<T>& ws, Node i, Node j) {
  ws.graph().edge_id(i, j);
  const T& aij = ws.weight(i, j);
  const T& aji = ws.weight(j, i);
  Matrix<T> m = Matrix<T>::identity(ws.node_count());
  m(i, i) = T(1) - aij;
  m(i, j) = aij;
  m(j, i) = aji;
  m(j, j) = T(1) - aji;
  return m;
}

/// r_ij = a_ij / a_ji.
template <Scalar T>
T ratio(const WeightSet<T>& ws, Node i, Node j) {
  return ws.weight(i, j) / ws.weight(j, i);
}

/// R_w: product of r along consecutive steps; 1 for walks with fewer than two
/// nodes.
template <Scalar T>
T walk_ratio(const WeightSet<T>& ws, const Walk& w) {
  validate_walk(ws.graph(), w);
  T product(1);
  for (std::size_t k = 0; k + 1 < w.nodes.size(); ++k) product *= ratio(ws, w.nodes[k], w.nodes[k + 1]);
  return product;
}

template <Scalar T>
struct HolonomyWitness {
  Walk cycle;
  T value;
};

template <Scalar T>
struct HolonomyReport {
  bool holonomic = true;
  /// First fundamental cycle whose ratio product is not 1.
  std::optional<HolonomyWitness<T>> witness;
};

/// Checks R_C == 1 on the fundamental cycles of the BFS tree rooted at node 0.
/// Because R is multiplicative under concatenation and R_{ww^-1} = 1, this
/// basis decides the condition for every cycle.
template <Scalar T>
HolonomyReport<T> check_holonomy(const WeightSet<T>& ws, double eta = kHolonomyTolerance) {
  const Graph& g = ws.graph();
  HolonomyReport<T> report;
  for (Walk& cycle : fundamental_cycles(g, spanning_tree(g, 0))) {
    T value = walk_ratio(ws, cycle);
    if (!is_unit(value, eta)) {
      report.holonomic = false;
      report.witness = HolonomyWitness<T>{std::move(cycle), std::move(value)};
      break;
    }
  }
  return report;
}

template <Scalar T>
bool is_holonomic(const WeightSet<T>& ws, double eta = kHolonomyTolerance) {
  return check_holonomy(ws, eta).holonomic;
}

/// Smallest nonzero entry over all local matrices: min over {a, 1 - a}.
template <Scalar T>
T min_weight(const WeightSet<T>& ws) {
  T best(1);
  for (const auto& w : ws.all())
    for (const T& v : {w.a_ij, T(1) - w.a_ij, w.a_ji, T(1) - w.a_ji})
      if (v < best) best = v;
  return best;
}

/// epsilon = min_weight^(n-1).
template <Scalar T>
T epsilon(const WeightSet<T>& ws) {
  T base = min_weight(ws);
  T out(1);
  for (std::size_t k = 1; k < ws.node_count(); ++k) out *= base;
  return out;
}

}  // namespace hologossip
