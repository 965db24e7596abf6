#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lpe/deadline.hpp"
#include "lpe/engine.hpp"
#include "lpe/graph.hpp"
#include "lpe/interval.hpp"
#include "lpe/messages.hpp"
#include "lpe/network.hpp"

namespace lpe {

class CutsetOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KnotContainment {
  std::vector<std::size_t> whole;    // every node and arc of the knot is active
  std::vector<std::size_t> partial;  // some but not all of it is active
};

KnotContainment contained_knots(const KnotDecomposition& knots, const ActiveSet& active);

/// Greedy loop cutset for one knot. Nodes in `preclamped` (observed nodes)
/// already split their outgoing arcs and are never chosen. Repeatedly takes,
/// from the 2-core of what is left, a node with at most one parent in the
/// core and an outgoing core arc, preferring high core degree, ties to the
/// smallest id. Returned ascending.
std::vector<NodeId> select_cutset(const Knot& knot, std::span<const NodeId> preclamped = {});

// A message entering the knot over `arc` from a node outside it: a π message
// (over the outside parent's states) when arc.child is in the knot, a λ
// message (over the knot node's states) when arc.parent is.
struct BoundaryMessage {
  Arc arc;
  IntervalVector value;
};

struct ConditioningRequest {
  const Knot* knot = nullptr;
  std::vector<NodeId> cutset;
  NodeId target = 0;
  // When set, the result is the message from `target` to this node outside
  // the knot; otherwise it is the belief of `target`.
  std::optional<NodeId> exit_peer;
  std::vector<BoundaryMessage> boundary;
};

struct ConditioningOptions {
  std::size_t max_instances = std::size_t{1} << 16;
  Deadline deadline;
};

// One joint assignment to the cutset with its normalized interval weight
// P(c | evidence reaching the knot).
struct CutsetAssignment {
  std::vector<std::size_t> states;  // parallel to the cutset
  Interval weight;
  IntervalVector value;  // the requested quantity under this assignment
};

struct ConditioningTable {
  std::vector<NodeId> cutset;
  std::vector<CutsetAssignment> instances;
};

struct ConditioningResult {
  IntervalVector value;
  ConditioningTable table;
  std::size_t node_visits = 0;
};

/// Interval cutset conditioning over one knot. Every cutset assignment (and
/// every observed node inside the knot) splits its outgoing knot arcs; the
/// rest of the knot is then a forest evaluated with the interval polytree
/// formulas, boundary messages folded in where they enter. The instance
/// results are mixed with A/R under the normalized instance weights.
ConditioningResult condition_knot(const BeliefNetwork& net, const Evidence& evidence,
                                  const ConditioningRequest& request,
                                  const ConditioningOptions& options = {});

/// Bounds on the query's posterior for one active set with knot
/// conditioning enabled.
IntervalVector propagate_mixed(const BeliefNetwork& net, const ActiveSet& active,
                               const Evidence& evidence, NodeId query);

}  // namespace lpe
