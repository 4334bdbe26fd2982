#pragma once

#include <stdexcept>
#include <string>

namespace hologossip {

enum class Errc {
  empty_graph,
  self_loop,
  duplicate_edge,
  disconnected_graph,
  node_out_of_range,
  unknown_edge,
  invalid_walk,
  invalid_tree,
  invalid_weight,
  not_holonomic,
  non_interior_vector,
  not_balanced,
  invalid_ratio,
  parameter_out_of_range,
  mismatched_node_counts,
  not_stochastic,
  graph_mismatch,
  invalid_schedule,
  parse_error,
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::empty_graph: return "EmptyGraph";
    case Errc::self_loop: return "SelfLoop";
    case Errc::duplicate_edge: return "DuplicateEdge";
    case Errc::disconnected_graph: return "DisconnectedGraph";
    case Errc::node_out_of_range: return "NodeOutOfRange";
    case Errc::unknown_edge: return "UnknownEdge";
    case Errc::invalid_walk: return "InvalidWalk";
    case Errc::invalid_tree: return "InvalidTree";
    case Errc::invalid_weight: return "InvalidWeight";
    case Errc::not_holonomic: return "NotHolonomic";
    case Errc::non_interior_vector: return "NonInteriorVector";
    case Errc::not_balanced: return "NotBalanced";
    case Errc::invalid_ratio: return "InvalidRatio";
    case Errc::parameter_out_of_range: return "ParameterOutOfRange";
    case Errc::mismatched_node_counts: return "MismatchedNodeCounts";
    case Errc::not_stochastic: return "NotStochastic";
    case Errc::graph_mismatch: return "GraphMismatch";
    case Errc::invalid_schedule: return "InvalidSchedule";
    case Errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the Errc codes above so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace hologossip
