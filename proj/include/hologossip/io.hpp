#pragma once

// File formats. Inputs are read with yaml-cpp, which accepts both JSON and
// YAML and tracks a line/column mark for every node; outputs are written as
// JSON with nlohmann/json. All node indices in files are 1-based.

#include <yaml-cpp/yaml.h>

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "design.hpp"
#include "engine.hpp"
#include "graph.hpp"
#include "limit.hpp"
#include "weights.hpp"

namespace hologossip::io {

using AnyWeightSet = std::variant<WeightSet<double>, WeightSet<Rational>>;

[[noreturn]] inline void fail_at(const std::string& source, const YAML::Node& node, const std::string& message) {
  const YAML::Mark mark = node.Mark();
  std::string where = source;
  if (!mark.is_null()) where += ":" + std::to_string(mark.line + 1) + ":" + std::to_string(mark.column + 1);
  throw Error(Errc::parse_error, where + ": " + message);
}

inline YAML::Node parse_document(const std::string& text, const std::string& source) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& ex) {
    throw Error(Errc::parse_error, source + ":" + std::to_string(ex.mark.line + 1) + ":" +
                                       std::to_string(ex.mark.column + 1) + ": " + ex.msg);
  }
}

inline YAML::Node load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse_error, path + ": cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_document(buffer.str(), path);
}

inline const YAML::Node require(const std::string& source, const YAML::Node& parent, const char* key) {
  if (!parent.IsMap()) fail_at(source, parent, "expected a mapping");
  YAML::Node child = parent[key];
  if (!child) fail_at(source, parent, std::string("missing field '") + key + "'");
  return child;
}

inline std::int64_t as_integer(const std::string& source, const YAML::Node& node, const char* what) {
  if (!node.IsScalar()) fail_at(source, node, std::string(what) + " must be an integer");
  const std::string& text = node.Scalar();
  std::size_t used = 0;
  std::int64_t value = 0;
  try {
    value = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) fail_at(source, node, std::string(what) + " must be an integer, got '" + text + "'");
  return value;
}

/// Reads a [i, j] pair of 1-based node indices and returns 0-based nodes.
inline std::pair<Node, Node> parse_pair(const std::string& source, const YAML::Node& node, std::size_t n) {
  if (!node.IsSequence() || node.size() != 2) fail_at(source, node, "an edge must be a list of two node indices");
  Node ends[2];
  for (std::size_t k = 0; k < 2; ++k) {
    std::int64_t v = as_integer(source, node[k], "node index");
    if (v < 1 || static_cast<std::uint64_t>(v) > n)
      fail_at(source, node[k], "node index " + std::to_string(v) + " outside 1.." + std::to_string(n));
    ends[k] = static_cast<Node>(v - 1);
  }
  return {ends[0], ends[1]};
}

// ---------------------------------------------------------------------------
// Graph: {n: int, edges: [[i, j], ...]}
// ---------------------------------------------------------------------------

inline GraphPtr parse_graph(const YAML::Node& root, const std::string& source) {
  YAML::Node n_node = require(source, root, "n");
  std::int64_t n = as_integer(source, n_node, "n");
  if (n < 1) fail_at(source, n_node, "n must be positive");
  YAML::Node edges = require(source, root, "edges");
  if (!edges.IsSequence()) fail_at(source, edges, "edges must be a list");
  std::vector<std::pair<Node, Node>> pairs;
  std::set<std::pair<Node, Node>> seen;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    auto [a, b] = parse_pair(source, edges[k], static_cast<std::size_t>(n));
    if (a == b) fail_at(source, edges[k], "self-loop at node " + std::to_string(a + 1));
    if (!seen.insert({std::min(a, b), std::max(a, b)}).second) fail_at(source, edges[k], "duplicate edge");
    pairs.emplace_back(a, b);
  }
  try {
    return make_graph(static_cast<std::size_t>(n), pairs);
  } catch (const Error& err) {
    fail_at(source, edges, err.what());
  }
}

inline GraphPtr load_graph(const std::string& path) { return parse_graph(load_document(path), path); }

inline nlohmann::ordered_json graph_to_json(const Graph& g) {
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.u + 1, e.v + 1});
  return {{"n", g.node_count()}, {"edges", edges}};
}

// ---------------------------------------------------------------------------
// Scalars: plain numbers select floating point, quoted strings ("2/3",
// "0.25") select exact rationals. A document must use one kind.
// ---------------------------------------------------------------------------

enum class ScalarKind { floating, rational };

inline bool plain_number(const YAML::Node& node, double* out) {
  if (node.Tag() == "!") return false;
  const std::string& text = node.Scalar();
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) return false;
    if (out) *out = v;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

inline ScalarKind scalar_kind(const std::string& source, const YAML::Node& node) {
  if (!node.IsScalar()) fail_at(source, node, "expected a number or a \"p/q\" string");
  return plain_number(node, nullptr) ? ScalarKind::floating : ScalarKind::rational;
}

template <Scalar T>
T parse_scalar(const std::string& source, const YAML::Node& node) {
  if constexpr (ScalarTraits<T>::exact) {
    try {
      return parse_rational(node.Scalar());
    } catch (const Error& err) {
      fail_at(source, node, err.what());
    }
  } else {
    double v = 0.0;
    if (!plain_number(node, &v)) fail_at(source, node, "expected a number");
    return v;
  }
}

// ---------------------------------------------------------------------------
// Weights: [{edge: [i, j], a_ij: x, a_ji: y}, ...]; a_ij is the weight agent
// i places on agent j's value.
// ---------------------------------------------------------------------------

namespace detail {

template <Scalar T>
WeightSet<T> parse_weights_as(const YAML::Node& list, const GraphPtr& g, const std::string& source) {
  std::vector<std::optional<EdgeWeights<T>>> slots(g->edge_count());
  for (std::size_t k = 0; k < list.size(); ++k) {
    const YAML::Node record = list[k];
    YAML::Node edge = require(source, record, "edge");
    auto [i, j] = parse_pair(source, edge, g->node_count());
    auto id = g->find_edge(i, j);
    if (!id) fail_at(source, edge, "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") is not a graph edge");
    if (slots[*id]) fail_at(source, edge, "edge listed twice");
    YAML::Node aij_node = require(source, record, "a_ij");
    YAML::Node aji_node = require(source, record, "a_ji");
    T aij = parse_scalar<T>(source, aij_node);
    T aji = parse_scalar<T>(source, aji_node);
    if (!(aij > T(0) && aij < T(1))) fail_at(source, aij_node, "weight must lie in (0,1)");
    if (!(aji > T(0) && aji < T(1))) fail_at(source, aji_node, "weight must lie in (0,1)");
    // Stored orientation is (u, v) with u < v.
    slots[*id] = g->edge(*id).u == i ? EdgeWeights<T>{aij, aji} : EdgeWeights<T>{aji, aij};
  }
  std::vector<EdgeWeights<T>> weights;
  for (EdgeId id = 0; id < slots.size(); ++id) {
    if (!slots[id]) {
      const Edge& e = g->edge(id);
      fail_at(source, list, "no weights for edge (" + std::to_string(e.u + 1) + "," + std::to_string(e.v + 1) + ")");
    }
    weights.push_back(*slots[id]);
  }
  return WeightSet<T>(g, std::move(weights));
}

}  // namespace detail

inline AnyWeightSet parse_weights(const YAML::Node& root, const GraphPtr& g, const std::string& source) {
  YAML::Node list = root.IsMap() && root["weights"] ? root["weights"] : root;
  if (!list.IsSequence()) fail_at(source, list, "weights must be a list of {edge, a_ij, a_ji} records");
  std::optional<ScalarKind> kind;
  for (std::size_t k = 0; k < list.size(); ++k) {
    if (!list[k].IsMap()) fail_at(source, list[k], "expected a {edge, a_ij, a_ji} record");
    for (const char* key : {"a_ij", "a_ji"}) {
      YAML::Node value = require(source, list[k], key);
      ScalarKind here = scalar_kind(source, value);
      if (kind && *kind != here) fail_at(source, value, "numbers and \"p/q\" strings cannot be mixed in one file");
      kind = here;
    }
  }
  if (kind == ScalarKind::rational) return detail::parse_weights_as<Rational>(list, g, source);
  return detail::parse_weights_as<double>(list, g, source);
}

inline AnyWeightSet load_weights(const std::string& path, const GraphPtr& g) {
  return parse_weights(load_document(path), g, path);
}

template <Scalar T>
nlohmann::ordered_json scalar_to_json(const T& v) {
  if constexpr (ScalarTraits<T>::exact) {
    return to_string(v);
  } else {
    return v;
  }
}

template <Scalar T>
nlohmann::ordered_json weights_to_json(const WeightSet<T>& ws) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (EdgeId id = 0; id < ws.graph().edge_count(); ++id) {
    const Edge& e = ws.graph().edge(id);
    const auto& w = ws.edge_weights(id);
    nlohmann::ordered_json record;
    record["edge"] = {e.u + 1, e.v + 1};
    record["a_ij"] = scalar_to_json(w.a_ij);
    record["a_ji"] = scalar_to_json(w.a_ji);
    out.push_back(std::move(record));
  }
  return out;
}

/// A weights document with one record per line.
template <Scalar T>
std::string format_weights(const WeightSet<T>& ws) {
  auto records = weights_to_json(ws);
  std::string out = "[\n";
  for (std::size_t k = 0; k < records.size(); ++k)
    out += "  " + records[k].dump() + (k + 1 < records.size() ? ",\n" : "\n");
  return out + "]\n";
}

// ---------------------------------------------------------------------------
// Schedule: {type: explicit, edges: [...]} | {type: periodic, period: [...],
// repetitions: k} | {type: random, steps: k, seed: s}
// ---------------------------------------------------------------------------

inline EdgeSequence parse_edge_list(const YAML::Node& list, const Graph& g, const std::string& source) {
  if (!list.IsSequence()) fail_at(source, list, "expected a list of edges");
  EdgeSequence out;
  for (std::size_t k = 0; k < list.size(); ++k) {
    auto [i, j] = parse_pair(source, list[k], g.node_count());
    auto id = g.find_edge(i, j);
    if (!id) fail_at(source, list[k], "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") is not a graph edge");
    out.push_back(*id);
  }
  return out;
}

/// `seed_override` (the CLI's --seed) wins over a seed in the file. A random
/// schedule with no seed at all is rejected.
inline Schedule parse_schedule(const YAML::Node& root, const GraphPtr& g, const std::string& source,
                               std::optional<std::uint64_t> seed_override = std::nullopt) {
  YAML::Node type = require(source, root, "type");
  const std::string kind = type.Scalar();
  if (kind == "explicit") {
    return explicit_schedule(g, parse_edge_list(require(source, root, "edges"), *g, source));
  }
  if (kind == "periodic") {
    YAML::Node period_node = require(source, root, "period");
    EdgeSequence period = parse_edge_list(period_node, *g, source);
    if (period.empty()) fail_at(source, period_node, "period must be nonempty");
    YAML::Node reps = require(source, root, "repetitions");
    std::int64_t r = as_integer(source, reps, "repetitions");
    if (r < 1) fail_at(source, reps, "repetitions must be at least 1");
    return periodic_schedule(g, std::move(period), static_cast<std::size_t>(r));
  }
  if (kind == "random") {
    YAML::Node steps = require(source, root, "steps");
    std::int64_t k = as_integer(source, steps, "steps");
    if (k < 1) fail_at(source, steps, "steps must be at least 1");
    std::optional<std::uint64_t> seed = seed_override;
    if (!seed && root["seed"]) {
      std::int64_t s = as_integer(source, root["seed"], "seed");
      if (s < 0) fail_at(source, root["seed"], "seed must be nonnegative");
      seed = static_cast<std::uint64_t>(s);
    }
    if (!seed) fail_at(source, root, "random schedules need an explicit seed");
    return random_schedule(g, *seed, static_cast<std::size_t>(k));
  }
  fail_at(source, type, "type must be explicit, periodic or random");
}

inline Schedule load_schedule(const std::string& path, const GraphPtr& g,
                              std::optional<std::uint64_t> seed_override = std::nullopt) {
  return parse_schedule(load_document(path), g, path, seed_override);
}

// ---------------------------------------------------------------------------
// Run output
// ---------------------------------------------------------------------------

inline std::string format_edge(const Graph& g, EdgeId id) {
  const Edge& e = g.edge(id);
  return "(" + std::to_string(e.u + 1) + "," + std::to_string(e.v + 1) + ")";
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Tab-separated trace with a header row: t, edge, seminorm, bound, min_entry.
/// The bound column is empty when no m-spanning bound applies.
inline void write_trace(std::ostream& out, const RunReport& report, const Graph& g) {
  out << "t\tedge\tseminorm\tbound\tmin_entry\n";
  for (const TraceRow& row : report.trace) {
    out << row.t << '\t' << (row.edge ? format_edge(g, *row.edge) : std::string()) << '\t'
        << format_number(row.seminorm) << '\t' << (row.bound ? format_number(*row.bound) : std::string()) << '\t'
        << format_number(row.min_entry) << '\n';
  }
}

inline nlohmann::ordered_json report_to_json(const RunReport& report) {
  nlohmann::ordered_json out;
  out["p_hat"] = report.limit;
  out["steps"] = report.steps;
  out["converged"] = report.converged;
  out["final_seminorm"] = report.final_seminorm;
  out["arithmetic"] = "binary64 floating point";
  out["schedule"] = schedule_kind_name(report.schedule_kind);
  out["epsilon"] = report.epsilon;
  out["m_spanning"] = report.m_spanning ? nlohmann::ordered_json(*report.m_spanning) : nlohmann::ordered_json(nullptr);
  out["max_bound_violation"] =
      report.max_bound_violation ? nlohmann::ordered_json(*report.max_bound_violation) : nlohmann::ordered_json(nullptr);
  out["bound_violations"] = report.bound_violations;
  if (report.final_state) out["final_state"] = *report.final_state;
  return out;
}

}  // namespace hologossip::io
