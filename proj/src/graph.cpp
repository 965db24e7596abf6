#include "lpe/graph.hpp"

#include <algorithm>
#include <numeric>

namespace lpe {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

bool is_forest(std::size_t node_count, std::span<const Arc> arcs) {
  DisjointSets sets(node_count);
  for (const Arc& a : arcs) {
    if (!sets.unite(a.parent, a.child)) return false;
  }
  return true;
}

bool is_polytree(const BeliefNetwork& net) {
  const auto arcs = net.arcs();
  return is_forest(net.size(), arcs);
}

std::vector<bool> ancestral_mask(const BeliefNetwork& net, std::span<const NodeId> seeds) {
  std::vector<bool> mask(net.size(), false);
  std::vector<NodeId> stack(seeds.begin(), seeds.end());
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (mask[id]) continue;
    mask[id] = true;
    for (NodeId p : net.parents(id)) stack.push_back(p);
  }
  return mask;
}

std::vector<bool> d_connected(const BeliefNetwork& net, NodeId source,
                              const std::vector<bool>& observed) {
  const std::size_t n = net.size();
  // Observed nodes and their ancestors: a collider passes the ball iff it is
  // in this set.
  std::vector<NodeId> observed_ids;
  for (NodeId id = 0; id < n; ++id) {
    if (observed[id]) observed_ids.push_back(id);
  }
  const auto activates_collider = ancestral_mask(net, observed_ids);

  enum Direction { kFromChild = 0, kFromParent = 1 };
  std::vector<bool> visited(2 * n, false);
  std::vector<bool> reachable(n, false);
  std::vector<std::pair<NodeId, Direction>> stack{{source, kFromChild}};
  while (!stack.empty()) {
    const auto [id, dir] = stack.back();
    stack.pop_back();
    if (visited[2 * id + dir]) continue;
    visited[2 * id + dir] = true;
    if (!observed[id]) reachable[id] = true;

    if (dir == kFromChild) {
      if (!observed[id]) {
        for (NodeId p : net.parents(id)) stack.push_back({p, kFromChild});
        for (NodeId c : net.children(id)) stack.push_back({c, kFromParent});
      }
    } else {
      if (!observed[id]) {
        for (NodeId c : net.children(id)) stack.push_back({c, kFromParent});
      }
      if (activates_collider[id]) {
        for (NodeId p : net.parents(id)) stack.push_back({p, kFromChild});
      }
    }
  }
  return reachable;
}

bool d_separated(const BeliefNetwork& net, NodeId a, NodeId b, const Evidence& evidence) {
  if (a >= net.size() || b >= net.size()) throw NetworkError("unknown node id");
  if (a == b) return false;
  std::vector<bool> observed(net.size(), false);
  for (const auto& [id, state] : evidence) observed[id] = true;
  observed[a] = false;
  observed[b] = false;
  return !d_connected(net, a, observed)[b];
}

std::vector<bool> relevant_mask(const BeliefNetwork& net, NodeId query,
                                const Evidence& evidence) {
  if (query >= net.size()) throw NetworkError("unknown query node");
  std::vector<NodeId> seeds{query};
  std::vector<bool> observed(net.size(), false);
  for (const auto& [id, state] : evidence) {
    seeds.push_back(id);
    observed[id] = true;
  }
  const auto ancestral = ancestral_mask(net, seeds);

  std::vector<bool> query_observed = observed;
  query_observed[query] = false;
  const auto connected = d_connected(net, query, query_observed);

  std::vector<bool> mask(net.size(), false);
  mask[query] = true;
  for (NodeId id = 0; id < net.size(); ++id) {
    if (id == query || !ancestral[id]) continue;
    if (!observed[id]) {
      mask[id] = connected[id];
    } else {
      // An observed node counts when it is linked to the query through the
      // other observations.
      mask[id] = !d_separated(net, query, id, evidence);
    }
  }
  return mask;
}

std::vector<NodeId> relevant_set(const BeliefNetwork& net, NodeId query,
                                 const Evidence& evidence) {
  const auto mask = relevant_mask(net, query, evidence);
  std::vector<NodeId> out;
  for (NodeId id = 0; id < net.size(); ++id) {
    if (mask[id]) out.push_back(id);
  }
  return out;
}

bool Knot::has_node(NodeId id) const {
  return std::binary_search(nodes.begin(), nodes.end(), id);
}

bool Knot::has_arc(const Arc& arc) const {
  return std::binary_search(arcs.begin(), arcs.end(), arc);
}

KnotDecomposition find_knots(std::size_t node_count, std::span<const Arc> arcs) {
  // Undirected adjacency with edge ids.
  std::vector<std::vector<std::pair<NodeId, std::size_t>>> adj(node_count);
  for (std::size_t e = 0; e < arcs.size(); ++e) {
    adj[arcs[e].parent].push_back({arcs[e].child, e});
    adj[arcs[e].child].push_back({arcs[e].parent, e});
  }

  // Iterative Tarjan over edges: each biconnected component is popped from
  // the edge stack when a DFS child cannot reach above its parent.
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> disc(node_count, kUnvisited), low(node_count, 0);
  std::vector<std::size_t> edge_stack;
  std::vector<std::vector<std::size_t>> components;
  std::size_t timer = 0;

  struct Frame {
    NodeId node;
    std::size_t parent_edge;
    std::size_t next = 0;
  };

  for (NodeId root = 0; root < node_count; ++root) {
    if (disc[root] != kUnvisited) continue;
    std::vector<Frame> frames{{root, kUnvisited}};
    disc[root] = low[root] = timer++;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.next < adj[f.node].size()) {
        const auto [to, e] = adj[f.node][f.next++];
        if (e == f.parent_edge) continue;
        if (disc[to] == kUnvisited) {
          edge_stack.push_back(e);
          disc[to] = low[to] = timer++;
          frames.push_back({to, e});
        } else if (disc[to] < disc[f.node]) {
          edge_stack.push_back(e);
          low[f.node] = std::min(low[f.node], disc[to]);
        }
      } else {
        const Frame done = f;
        frames.pop_back();
        if (frames.empty()) break;
        Frame& up = frames.back();
        low[up.node] = std::min(low[up.node], low[done.node]);
        if (low[done.node] >= disc[up.node]) {
          std::vector<std::size_t> component;
          while (true) {
            const std::size_t e = edge_stack.back();
            edge_stack.pop_back();
            component.push_back(e);
            if (e == done.parent_edge) break;
          }
          components.push_back(std::move(component));
        }
      }
    }
  }

  DisjointSets sets(node_count);
  std::vector<bool> in_knot(node_count, false);
  std::vector<bool> cyclic_edge(arcs.size(), false);
  for (const auto& component : components) {
    if (component.size() < 2) continue;
    for (std::size_t e : component) {
      cyclic_edge[e] = true;
      in_knot[arcs[e].parent] = in_knot[arcs[e].child] = true;
      sets.unite(arcs[e].parent, arcs[e].child);
    }
  }

  std::vector<std::size_t> knot_index(node_count, kUnvisited);
  KnotDecomposition out;
  for (NodeId id = 0; id < node_count; ++id) {
    if (!in_knot[id]) continue;
    const std::size_t rep = sets.find(id);
    if (knot_index[rep] == kUnvisited) {
      knot_index[rep] = out.knots.size();
      out.knots.emplace_back();
    }
    out.knots[knot_index[rep]].nodes.push_back(id);
  }
  for (std::size_t e = 0; e < arcs.size(); ++e) {
    if (!cyclic_edge[e]) continue;
    out.knots[knot_index[sets.find(arcs[e].parent)]].arcs.push_back(arcs[e]);
  }
  for (auto& k : out.knots) std::sort(k.arcs.begin(), k.arcs.end());
  return out;
}

KnotDecomposition find_knots(const BeliefNetwork& net) {
  const auto arcs = net.arcs();
  return find_knots(net.size(), arcs);
}

}  // namespace lpe
