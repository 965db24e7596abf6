#pragma once

#include <span>
#include <vector>

#include "lpe/network.hpp"

namespace lpe {

// True iff the undirected skeleton of the network has no cycle.
bool is_polytree(const BeliefNetwork& net);

// True iff the undirected graph on `node_count` nodes formed by `arcs` has no
// cycle.
bool is_forest(std::size_t node_count, std::span<const Arc> arcs);

// Nodes connected to `source` by a trail that is active given `observed`
// (Bayes-ball reachability). The source itself is included unless observed.
std::vector<bool> d_connected(const BeliefNetwork& net, NodeId source,
                              const std::vector<bool>& observed);

/// Standard d-separation between two nodes given the evidence. The two
/// endpoints are removed from the conditioning set first, so the question for
/// an observed endpoint is whether it is linked to the other node through
/// the remaining observations. Symmetric in `a` and `b`.
bool d_separated(const BeliefNetwork& net, NodeId a, NodeId b, const Evidence& evidence);

// Mask of the seeds and all their ancestors.
std::vector<bool> ancestral_mask(const BeliefNetwork& net, std::span<const NodeId> seeds);

/// Nodes that can influence the posterior of `query`: the query itself plus
/// every node that is an ancestor of the query or of an observed node (barren
/// nodes are summed out exactly and carry no information) and is not
/// d-separated from the query given the evidence.
std::vector<bool> relevant_mask(const BeliefNetwork& net, NodeId query,
                                const Evidence& evidence);
std::vector<NodeId> relevant_set(const BeliefNetwork& net, NodeId query,
                                 const Evidence& evidence);

// A maximal multiply-connected component of an undirected skeleton.
struct Knot {
  std::vector<NodeId> nodes;  // sorted
  std::vector<Arc> arcs;      // sorted

  bool has_node(NodeId id) const;
  bool has_arc(const Arc& arc) const;
};

struct KnotDecomposition {
  std::vector<Knot> knots;

  bool empty() const { return knots.empty(); }
  std::size_t size() const { return knots.size(); }
};

// Biconnected components that contain a cycle, merged when they share a
// node. Arcs that lie on no cycle belong to no knot.
KnotDecomposition find_knots(std::size_t node_count, std::span<const Arc> arcs);
KnotDecomposition find_knots(const BeliefNetwork& net);

}  // namespace lpe
