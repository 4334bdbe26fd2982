#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "union_find.hpp"

namespace hologossip {

/// Node index. The library is 0-indexed; files and the CLI are 1-indexed.
using Node = std::size_t;
/// Position of an edge in Graph::edges().
using EdgeId = std::size_t;

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

/// Undirected edge stored with u < v.
struct Edge {
  Node u;
  Node v;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Neighbor {
  Node node;
  EdgeId edge;
};

/// Simple connected undirected graph. Immutable after construction.
///
/// Edge ids follow the order edges were supplied in; adjacency lists are
/// sorted by neighbor index so every traversal is deterministic.
class Graph {
 public:
  std::size_t node_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId id) const { return edges_.at(id); }
  const std::vector<Neighbor>& neighbors(Node v) const { return adjacency_.at(v); }

  std::optional<EdgeId> find_edge(Node a, Node b) const {
    if (a == b) return std::nullopt;
    auto it = index_.find(a < b ? Edge{a, b} : Edge{b, a});
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  EdgeId edge_id(Node a, Node b) const {
    auto id = find_edge(a, b);
    if (!id)
      throw Error(Errc::unknown_edge,
                  "(" + std::to_string(a + 1) + "," + std::to_string(b + 1) + ") is not an edge");
    return *id;
  }

  bool is_tree() const { return edge_count() + 1 == node_count(); }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.node_count() == b.node_count() && a.edges_ == b.edges_;
  }

 private:
  friend Graph build_graph(std::size_t, const std::vector<std::pair<Node, Node>>&);

  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::map<Edge, EdgeId> index_;
};

using GraphPtr = std::shared_ptr<const Graph>;

/// Validates and builds a graph on nodes 0..n-1.
inline Graph build_graph(std::size_t n, const std::vector<std::pair<Node, Node>>& pairs) {
  if (n == 0) throw Error(Errc::empty_graph, "graph has no nodes");
  Graph g;
  g.adjacency_.resize(n);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto [a, b] = pairs[k];
    if (a >= n || b >= n)
      throw Error(Errc::node_out_of_range, "edge " + std::to_string(k) + " references node outside 1.." +
                                               std::to_string(n));
    if (a == b) throw Error(Errc::self_loop, "self-loop at node " + std::to_string(a + 1));
    Edge e = a < b ? Edge{a, b} : Edge{b, a};
    if (!g.index_.emplace(e, g.edges_.size()).second)
      throw Error(Errc::duplicate_edge,
                  "edge (" + std::to_string(e.u + 1) + "," + std::to_string(e.v + 1) + ") listed twice");
    g.adjacency_[e.u].push_back({e.v, g.edges_.size()});
    g.adjacency_[e.v].push_back({e.u, g.edges_.size()});
    g.edges_.push_back(e);
  }
  if (g.edges_.empty()) throw Error(Errc::empty_graph, "graph has no edges");
  for (auto& list : g.adjacency_)
    std::sort(list.begin(), list.end(), [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });

  std::vector<bool> seen(n, false);
  std::vector<Node> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    Node v = stack.back();
    stack.pop_back();
    for (const auto& nb : g.adjacency_[v])
      if (!seen[nb.node]) {
        seen[nb.node] = true;
        ++reached;
        stack.push_back(nb.node);
      }
  }
  if (reached != n) {
    Node missing = static_cast<Node>(std::find(seen.begin(), seen.end(), false) - seen.begin());
    throw Error(Errc::disconnected_graph, "node " + std::to_string(missing + 1) + " is unreachable from node 1");
  }
  return g;
}

inline GraphPtr make_graph(std::size_t n, const std::vector<std::pair<Node, Node>>& pairs) {
  return std::make_shared<const Graph>(build_graph(n, pairs));
}

/// A walk v_{i1} ... v_{ik} in the bidirectionalized graph.
struct Walk {
  std::vector<Node> nodes;

  bool closed() const { return !nodes.empty() && nodes.front() == nodes.back(); }
  std::size_t length() const { return nodes.empty() ? 0 : nodes.size() - 1; }

  Walk inverse() const { return Walk{{nodes.rbegin(), nodes.rend()}}; }

  /// ww': requires this walk to end where `next` starts.
  Walk concat(const Walk& next) const {
    if (nodes.empty()) return next;
    if (next.nodes.empty()) return *this;
    if (nodes.back() != next.nodes.front())
      throw Error(Errc::invalid_walk, "concatenated walks do not meet");
    Walk out = *this;
    out.nodes.insert(out.nodes.end(), next.nodes.begin() + 1, next.nodes.end());
    return out;
  }

  friend bool operator==(const Walk&, const Walk&) = default;
};

inline void validate_walk(const Graph& g, const Walk& w) {
  for (Node v : w.nodes)
    if (v >= g.node_count()) throw Error(Errc::invalid_walk, "walk leaves the node set");
  for (std::size_t k = 0; k + 1 < w.nodes.size(); ++k)
    if (!g.find_edge(w.nodes[k], w.nodes[k + 1]))
      throw Error(Errc::invalid_walk, "step " + std::to_string(w.nodes[k] + 1) + "->" +
                                          std::to_string(w.nodes[k + 1] + 1) + " is not an edge");
}

/// Renders a walk 1-indexed, e.g. "2→1→3→2".
inline std::string format_walk(const Walk& w) {
  std::string out;
  for (std::size_t k = 0; k < w.nodes.size(); ++k) {
    if (k) out += "→";
    out += std::to_string(w.nodes[k] + 1);
  }
  return out;
}

/// An ordered sequence of edge ids (a gossip schedule prefix or string).
using EdgeSequence = std::vector<EdgeId>;

/// Rooted spanning tree. parent[root] == npos.
struct SpanningTree {
  Node root = 0;
  std::vector<Node> parent;
  std::vector<EdgeId> parent_edge;
  std::vector<std::size_t> depth;
  /// Tree edge ids in discovery order.
  std::vector<EdgeId> edges;

  /// Unique tree path from `from` to `to`.
  Walk path(Node from, Node to) const {
    std::vector<Node> up, down;
    Node a = from, b = to;
    while (depth[a] > depth[b]) { up.push_back(a); a = parent[a]; }
    while (depth[b] > depth[a]) { down.push_back(b); b = parent[b]; }
    while (a != b) {
      up.push_back(a);
      down.push_back(b);
      a = parent[a];
      b = parent[b];
    }
    up.push_back(a);
    up.insert(up.end(), down.rbegin(), down.rend());
    return Walk{std::move(up)};
  }

  std::vector<EdgeId> sorted_edges() const {
    auto out = edges;
    std::sort(out.begin(), out.end());
    return out;
  }
};

namespace detail {

/// BFS over the edges flagged in `allowed` (all edges when empty).
inline SpanningTree bfs_tree(const Graph& g, Node root, const std::vector<bool>& allowed) {
  const std::size_t n = g.node_count();
  SpanningTree t;
  t.root = root;
  t.parent.assign(n, npos);
  t.parent_edge.assign(n, npos);
  t.depth.assign(n, npos);
  t.depth[root] = 0;
  std::queue<Node> queue;
  queue.push(root);
  while (!queue.empty()) {
    Node v = queue.front();
    queue.pop();
    for (const auto& nb : g.neighbors(v)) {
      if (!allowed.empty() && !allowed[nb.edge]) continue;
      if (t.depth[nb.node] != npos) continue;
      t.depth[nb.node] = t.depth[v] + 1;
      t.parent[nb.node] = v;
      t.parent_edge[nb.node] = nb.edge;
      t.edges.push_back(nb.edge);
      queue.push(nb.node);
    }
  }
  return t;
}

}  // namespace detail

/// Breadth-first spanning tree; neighbors are visited in ascending index.
inline SpanningTree spanning_tree(const Graph& g, Node root = 0) {
  if (root >= g.node_count()) throw Error(Errc::node_out_of_range, "root outside node set");
  return detail::bfs_tree(g, root, {});
}

/// Builds the rooted tree whose edge set is exactly `tree_edges`.
inline SpanningTree spanning_tree_from_edges(const Graph& g, const std::vector<EdgeId>& tree_edges, Node root = 0) {
  const std::size_t n = g.node_count();
  if (tree_edges.size() + 1 != n)
    throw Error(Errc::invalid_tree, "a spanning tree needs exactly n-1 edges");
  UnionFind uf(n);
  std::vector<bool> allowed(g.edge_count(), false);
  for (EdgeId id : tree_edges) {
    if (id >= g.edge_count()) throw Error(Errc::unknown_edge, "tree edge id out of range");
    const Edge& e = g.edge(id);
    if (!uf.unite(e.u, e.v)) throw Error(Errc::invalid_tree, "tree edges contain a cycle");
    allowed[id] = true;
  }
  return detail::bfs_tree(g, root, allowed);
}

/// Extends `required` (which must be acyclic) to a spanning tree by adding the
/// remaining graph edges in id order.
inline SpanningTree complete_spanning_tree(const Graph& g, const std::vector<EdgeId>& required, Node root = 0) {
  UnionFind uf(g.node_count());
  std::vector<EdgeId> chosen;
  for (EdgeId id : required) {
    const Edge& e = g.edge(id);
    if (!uf.unite(e.u, e.v)) throw Error(Errc::invalid_tree, "required edges contain a cycle");
    chosen.push_back(id);
  }
  for (EdgeId id = 0; id < g.edge_count(); ++id) {
    const Edge& e = g.edge(id);
    if (uf.unite(e.u, e.v)) chosen.push_back(id);
  }
  return spanning_tree_from_edges(g, chosen, root);
}

/// One closed walk per non-tree edge (i,j), i<j: the tree path i→j followed
/// by j→i. Ordered by the non-tree edge id; |E| - n + 1 walks in total.
inline std::vector<Walk> fundamental_cycles(const Graph& g, const SpanningTree& t) {
  std::vector<bool> in_tree(g.edge_count(), false);
  for (EdgeId id : t.edges) in_tree[id] = true;
  std::vector<Walk> cycles;
  for (EdgeId id = 0; id < g.edge_count(); ++id) {
    if (in_tree[id]) continue;
    const Edge& e = g.edge(id);
    Walk w = t.path(e.u, e.v);
    w.nodes.push_back(e.u);
    cycles.push_back(std::move(w));
  }
  return cycles;
}

/// Directed graph on n nodes as a dense adjacency matrix; has_edge(a, b)
/// means a→b.
class Digraph {
 public:
  explicit Digraph(std::size_t n = 0) : n_(n), adj_(n * n, 0) {}

  /// Self-loops only: the identity of composition.
  static Digraph self_loops(std::size_t n) {
    Digraph d(n);
    for (Node v = 0; v < n; ++v) d.add_edge(v, v);
    return d;
  }

  /// Bidirectionalized graph of g, optionally with a self-loop at every node.
  static Digraph from_graph(const Graph& g, bool with_self_loops) {
    Digraph d = with_self_loops ? self_loops(g.node_count()) : Digraph(g.node_count());
    for (const Edge& e : g.edges()) {
      d.add_edge(e.u, e.v);
      d.add_edge(e.v, e.u);
    }
    return d;
  }

  std::size_t node_count() const { return n_; }
  void add_edge(Node from, Node to) { adj_[from * n_ + to] = 1; }
  bool has_edge(Node from, Node to) const { return adj_[from * n_ + to] != 0; }

  std::size_t edge_count() const {
    return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), std::uint8_t{1}));
  }

  friend bool operator==(const Digraph&, const Digraph&) = default;

 private:
  std::size_t n_;
  std::vector<std::uint8_t> adj_;
};

/// Graph of a matrix: v_j→v_i whenever entry (i, j) is nonzero.
template <class T>
Digraph graph_of(const Matrix<T>& m) {
  if (m.rows() != m.cols()) throw Error(Errc::mismatched_node_counts, "graph_of needs a square matrix");
  Digraph d(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != T(0)) d.add_edge(j, i);
  return d;
}

/// gq ∘ gp: a→b iff a→k in gp and k→b in gq for some k. With this order,
/// graph_of(M2 * M1) == compose(graph_of(M2), graph_of(M1)).
inline Digraph compose(const Digraph& gq, const Digraph& gp) {
  const std::size_t n = gp.node_count();
  if (gq.node_count() != n) throw Error(Errc::mismatched_node_counts, "composed digraphs differ in size");
  Digraph out(n);
  for (Node a = 0; a < n; ++a)
    for (Node k = 0; k < n; ++k) {
      if (!gp.has_edge(a, k)) continue;
      for (Node b = 0; b < n; ++b)
        if (gq.has_edge(k, b)) out.add_edge(a, b);
    }
  return out;
}

/// Every pair of distinct nodes has a common in-neighbor.
inline bool is_neighbor_shared(const Digraph& g) {
  const std::size_t n = g.node_count();
  for (Node a = 0; a < n; ++a)
    for (Node b = a + 1; b < n; ++b) {
      bool shared = false;
      for (Node k = 0; k < n && !shared; ++k) shared = g.has_edge(k, a) && g.has_edge(k, b);
      if (!shared) return false;
    }
  return true;
}

inline bool is_strongly_connected(const Digraph& g) {
  const std::size_t n = g.node_count();
  if (n == 0) return true;
  auto reaches_all = [&](bool forward) {
    std::vector<bool> seen(n, false);
    std::vector<Node> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      Node v = stack.back();
      stack.pop_back();
      for (Node w = 0; w < n; ++w) {
        bool edge = forward ? g.has_edge(v, w) : g.has_edge(w, v);
        if (edge && !seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool s) { return s; });
  };
  return reaches_all(true) && reaches_all(false);
}

/// True iff the edges of `sequence` cover a spanning tree of g.
inline bool is_spanning(const Graph& g, const EdgeSequence& sequence) {
  UnionFind uf(g.node_count());
  for (EdgeId id : sequence) {
    const Edge& e = g.edge(id);
    uf.unite(e.u, e.v);
    if (uf.components() == 1) return true;
  }
  return uf.components() == 1;
}

}  // namespace hologossip
