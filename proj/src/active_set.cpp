#include <algorithm>
#include <numeric>

#include "lpe/engine.hpp"

namespace lpe {

QueryScope make_scope(const BeliefNetwork& net, NodeId query, const Evidence& evidence) {
  if (query >= net.size()) throw NetworkError("unknown query node");
  QueryScope scope;
  scope.query = query;
  scope.evidence = evidence;

  std::vector<NodeId> seeds{query};
  for (const auto& [id, state] : evidence) seeds.push_back(id);
  scope.in_scope = ancestral_mask(net, seeds);
  scope.relevant = relevant_mask(net, query, evidence);

  const std::size_t n = net.size();
  scope.neighbors.resize(n);
  scope.parents.resize(n);
  std::vector<Arc> relevant_arcs;
  for (NodeId id = 0; id < n; ++id) {
    if (!scope.in_scope[id]) continue;
    auto& nb = scope.neighbors[id];
    const auto ps = net.parents(id);
    scope.parents[id].assign(ps.begin(), ps.end());
    for (NodeId p : net.parents(id)) nb.push_back(p);
    for (NodeId c : net.children(id)) {
      if (scope.in_scope[c]) nb.push_back(c);
    }
    std::sort(nb.begin(), nb.end());
    for (NodeId p : net.parents(id)) {
      if (scope.relevant[p] && scope.relevant[id]) relevant_arcs.push_back({p, id});
    }
  }

  scope.knots = find_knots(n, relevant_arcs);
  scope.knot_of.assign(n, -1);
  for (std::size_t k = 0; k < scope.knots.size(); ++k) {
    for (NodeId id : scope.knots.knots[k].nodes) scope.knot_of[id] = static_cast<std::ptrdiff_t>(k);
  }
  return scope;
}

ActiveSet::ActiveSet(std::size_t node_count, NodeId query)
    : query_(query), member_(node_count, false) {
  if (query >= node_count) throw std::out_of_range("query outside the network");
  add_node(query);
  frontier_.push_back(query);
}

void ActiveSet::add_node(NodeId id) {
  if (member_.at(id)) return;
  member_[id] = true;
  order_.push_back(id);
}

void ActiveSet::add_arc(const Arc& arc) {
  if (!member_.at(arc.parent) || !member_.at(arc.child)) {
    throw std::invalid_argument("active arc endpoint is not an active node");
  }
  arcs_.insert(arc);
}

const char* to_string(Strategy::Kind kind) {
  switch (kind) {
    case Strategy::Kind::kBreadthFirst: return "bfs";
    case Strategy::Kind::kNoLoops: return "no-loops";
    case Strategy::Kind::kDelayedLoops: return "delayed";
  }
  return "?";
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

struct Expander {
  static ExpansionResult run(const ActiveSet& current, const Strategy& strategy,
                             const QueryScope& scope) {
    ActiveSet next = current;
    const std::size_t n = next.member_.size();
    ++next.round_;
    bool grew = false;

    auto release = [&](std::size_t upto) {
      for (auto it = next.pending_.begin(); it != next.pending_.end();) {
        if (it->second <= upto) {
          next.arcs_.insert(it->first);
          it = next.pending_.erase(it);
          grew = true;
        } else {
          ++it;
        }
      }
    };
    release(next.round_);

    std::vector<NodeId> added;
    for (NodeId x : current.frontier_) {
      for (NodeId w : scope.neighbors[x]) {
        if (scope.relevant[w] && !next.member_[w]) {
          next.add_node(w);
          added.push_back(w);
        }
      }
    }
    grew = grew || !added.empty();

    std::vector<std::size_t> disc(n, n);
    for (std::size_t i = 0; i < next.order_.size(); ++i) disc[next.order_[i]] = i;

    // Arcs between a new node and any member, in discovery order.
    std::vector<Arc> candidates;
    for (NodeId w : added) {
      for (NodeId v : scope.neighbors[w]) {
        if (!next.member_[v]) continue;
        const auto& ps = scope.parents[w];
        const bool v_parent = std::find(ps.begin(), ps.end(), v) != ps.end();
        candidates.push_back(v_parent ? Arc{v, w} : Arc{w, v});
      }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    auto key = [&](const Arc& a) {
      const std::size_t d1 = disc[a.parent], d2 = disc[a.child];
      return std::pair{std::max(d1, d2), std::min(d1, d2)};
    };
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](const Arc& a, const Arc& b) { return key(a) < key(b); });

    UnionFind uf(n);
    for (const Arc& a : next.arcs_) uf.unite(a.parent, a.child);
    for (const Arc& a : candidates) {
      if (next.arcs_.count(a) || next.excluded_.count(a) || next.pending_.count(a)) continue;
      const bool closes = uf.find(a.parent) == uf.find(a.child);
      if (closes && strategy.kind == Strategy::Kind::kNoLoops) {
        next.excluded_.insert(a);
        continue;
      }
      if (closes && strategy.kind == Strategy::Kind::kDelayedLoops) {
        next.pending_[a] = next.round_ + strategy.delay;
        continue;
      }
      uf.unite(a.parent, a.child);
      next.arcs_.insert(a);
      grew = true;
    }
    next.frontier_ = std::move(added);

    // Nothing else can change until the next held-back arc is due: release it
    // now rather than spend empty rounds waiting.
    if (!grew && !next.pending_.empty()) {
      std::size_t earliest = next.pending_.begin()->second;
      for (const auto& [arc, due] : next.pending_) earliest = std::min(earliest, due);
      release(earliest);
    }
    return ExpansionResult{std::move(next), !grew};
  }
};

ExpansionResult expand(const ActiveSet& active, const Strategy& strategy,
                       const QueryScope& scope) {
  if (scope.query != active.query()) throw std::invalid_argument("scope is for another query");
  return Expander::run(active, strategy, scope);
}

ExpansionResult expand(const ActiveSet& active, const Strategy& strategy,
                       const BeliefNetwork& net, NodeId query, const Evidence& evidence) {
  return expand(active, strategy, make_scope(net, query, evidence));
}

}  // namespace lpe
