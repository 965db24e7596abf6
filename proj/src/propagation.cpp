#include <algorithm>
#include <deque>

#include "lpe/engine.hpp"
#include "lpe/loops.hpp"

namespace lpe {

bool MessageCache::update(const Key& key, const Message& message,
                          std::vector<IntervalVector> inputs) {
  auto it = entries_.find(key);
  if (it != entries_.end()) {
    const bool same = bit_equal(it->second.message.value.dist, message.value.dist) &&
                      bit_equal(IntervalVector{it->second.message.value.scale},
                                IntervalVector{message.value.scale});
    it->second = Entry{message, std::move(inputs)};
    return !same;
  }
  entries_.emplace(key, Entry{message, std::move(inputs)});
  return true;
}

const Message* MessageCache::find(const Key& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second.message;
}

const Message* MessageCache::reusable(const Key& key,
                                      const std::vector<IntervalVector>& inputs) const {
  auto it = entries_.find(key);
  if (it == entries_.end() || it->second.inputs.size() != inputs.size()) return nullptr;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!bit_equal(it->second.inputs[i], inputs[i])) return nullptr;
  }
  return &it->second.message;
}

Propagator::Propagator(const BeliefNetwork& net, QueryScope scope, PropagationOptions options)
    : net_(net),
      scope_(std::move(scope)),
      options_(options),
      cutsets_(scope_.knots.size()),
      cutset_ready_(scope_.knots.size(), false) {
  if (scope_.in_scope.size() != net.size()) throw std::invalid_argument("scope built for another network");
}

namespace {

bool is_parent(const QueryScope& scope, NodeId p, NodeId c) {
  const auto& ps = scope.parents[c];
  return std::find(ps.begin(), ps.end(), p) != ps.end();
}

Arc arc_between(const QueryScope& scope, NodeId a, NodeId b) {
  return is_parent(scope, a, b) ? Arc{a, b} : Arc{b, a};
}

}  // namespace

bool Propagator::used(NodeId a, NodeId b) const {
  return used_.count(arc_between(scope_, a, b)) > 0;
}

void Propagator::plan(const ActiveSet& active) {
  const std::size_t n = net_.size();
  used_.clear();
  whole_knot_of_.assign(n, -1);

  std::vector<std::vector<NodeId>> members;  // per whole knot
  if (options_.condition_knots) {
    for (std::size_t k : contained_knots(scope_.knots, active).whole) {
      const Knot& knot = scope_.knots.knots[k];
      for (NodeId id : knot.nodes) whole_knot_of_[id] = static_cast<std::ptrdiff_t>(k);
      used_.insert(knot.arcs.begin(), knot.arcs.end());
    }
  }

  // Active arcs that can carry information, knot interiors excluded.
  std::vector<std::vector<std::pair<NodeId, Arc>>> adj(n);
  for (const Arc& a : active.arcs()) {
    if (!scope_.in_scope[a.parent] || !scope_.in_scope[a.child]) continue;
    if (whole_knot_of_[a.parent] >= 0 && whole_knot_of_[a.parent] == whole_knot_of_[a.child]) {
      continue;
    }
    adj[a.parent].push_back({a.child, a});
    adj[a.child].push_back({a.parent, a});
  }

  // Breadth-first from the query with whole knots contracted to one vertex;
  // an arc reaching an already visited vertex closes a cycle and is left out.
  auto vertex = [&](NodeId id) {
    return whole_knot_of_[id] >= 0 ? n + static_cast<std::size_t>(whole_knot_of_[id]) : id;
  };
  auto members_of = [&](NodeId id) {
    if (whole_knot_of_[id] < 0) return std::vector<NodeId>{id};
    return scope_.knots.knots[static_cast<std::size_t>(whole_knot_of_[id])].nodes;
  };
  std::vector<bool> seen(n + scope_.knots.size(), false);
  std::set<Arc> handled;
  std::deque<NodeId> queue{scope_.query};
  seen[vertex(scope_.query)] = true;
  while (!queue.empty()) {
    const NodeId head = queue.front();
    queue.pop_front();
    for (NodeId m : members_of(head)) {
      for (const auto& [other, arc] : adj[m]) {
        if (!handled.insert(arc).second) continue;
        if (!seen[vertex(other)]) {
          seen[vertex(other)] = true;
          used_.insert(arc);
          queue.push_back(other);
        } else {
          if (!options_.condition_knots) {
            throw std::invalid_argument("active arcs contain an undirected cycle");
          }
          ++stats_.dropped_arcs;
        }
      }
    }
  }
}

Propagator::Inputs Propagator::gather(NodeId node, std::optional<NodeId> exclude) {
  Inputs in;
  for (NodeId p : scope_.parents[node]) {
    if (exclude && p == *exclude) {
      in.parents.push_back(ScaledVector{vacuous(net_.state_count(p))});
      continue;
    }
    in.parents.push_back(used(p, node) ? message(p, node)
                                       : ScaledVector{vacuous(net_.state_count(p))});
    in.signature.push_back(in.parents.back().dist);
  }
  for (NodeId c : scope_.neighbors[node]) {
    if (is_parent(scope_, c, node) || (exclude && c == *exclude)) continue;
    in.children.push_back(used(node, c) ? message(c, node)
                                        : ScaledVector{vacuous(net_.state_count(node))});
    in.signature.push_back(in.children.back().dist);
  }
  return in;
}

ScaledVector Propagator::message(NodeId from, NodeId to) {
  check_deadline(options_.deadline);
  const std::ptrdiff_t k = whole_knot_of_[from];
  if (k >= 0 && whole_knot_of_[to] != k) {
    return knot_output(static_cast<std::size_t>(k), from, to);
  }
  return tree_message(from, to);
}

ScaledVector Propagator::tree_message(NodeId from, NodeId to) {
  Inputs in = gather(from, to);
  const MessageCache::Key key{from, to, -1};
  if (options_.use_cache) {
    if (const Message* hit = cache_.reusable(key, in.signature)) {
      ++stats_.cache_hits;
      return hit->value;
    }
  }
  ++stats_.node_visits;
  const LocalFactor factor = local_factor(net_, from);
  const auto obs = scope_.observed(from);
  Message m;
  if (is_parent(scope_, from, to)) {
    m.kind = MessageKind::kPi;
    m.arc = Arc{from, to};
    m.value = pi_msg(pi_hat(factor, in.parents), in.children, obs);
  } else {
    const auto& ps = scope_.parents[from];
    const auto slot = static_cast<std::size_t>(std::find(ps.begin(), ps.end(), to) - ps.begin());
    m.kind = MessageKind::kLambda;
    m.arc = Arc{to, from};
    m.value = lambda_msg(factor, slot, lambda_hat(factor.states, in.children, obs), in.parents);
  }
  if (options_.use_cache) cache_.update(key, m, std::move(in.signature));
  return m.value;
}

ScaledVector Propagator::knot_output(std::size_t k, NodeId target, std::optional<NodeId> peer) {
  const Knot& knot = scope_.knots.knots[k];
  ConditioningRequest request;
  request.knot = &knot;
  request.target = target;
  request.exit_peer = peer;

  // Boundary messages are taken at unit scale: any factor they share is
  // common to every cutset instance.
  std::vector<IntervalVector> signature;
  for (NodeId x : knot.nodes) {
    for (NodeId w : scope_.neighbors[x]) {
      if (knot.has_node(w) || (peer && x == target && w == *peer)) continue;
      const Arc arc = arc_between(scope_, x, w);
      IntervalVector value = used_.count(arc) ? message(w, x).dist
                                              : vacuous(net_.state_count(arc.parent));
      signature.push_back(value);
      request.boundary.push_back(BoundaryMessage{arc, std::move(value)});
    }
  }

  const MessageCache::Key key{target, peer.value_or(target), static_cast<std::ptrdiff_t>(k)};
  if (options_.use_cache) {
    if (const Message* hit = cache_.reusable(key, signature)) {
      ++stats_.cache_hits;
      return hit->value;
    }
  }

  if (!cutset_ready_[k]) {
    std::vector<NodeId> observed;
    for (NodeId id : knot.nodes) {
      if (scope_.evidence.count(id)) observed.push_back(id);
    }
    cutsets_[k] = select_cutset(knot, observed);
    cutset_ready_[k] = true;
  }
  request.cutset = cutsets_[k];

  ConditioningOptions copts;
  copts.max_instances = options_.max_cutset_instances;
  copts.deadline = options_.deadline;
  const ConditioningResult result = condition_knot(net_, scope_.evidence, request, copts);
  stats_.node_visits += result.node_visits;
  ++stats_.conditioned_knots;

  Message m;
  if (peer) {
    const bool to_child = is_parent(scope_, target, *peer);
    m.kind = to_child ? MessageKind::kPi : MessageKind::kLambda;
    m.arc = to_child ? Arc{target, *peer} : Arc{*peer, target};
  }
  m.value = ScaledVector{result.value};
  if (options_.use_cache) cache_.update(key, m, std::move(signature));
  return m.value;
}

IntervalVector Propagator::run(const ActiveSet& active) {
  if (active.query() != scope_.query) throw std::invalid_argument("active set is for another query");
  if (active.capacity() != net_.size()) throw std::invalid_argument("active set is for another network");
  stats_ = PropagationStats{};
  plan(active);

  const NodeId q = scope_.query;
  if (whole_knot_of_[q] >= 0) {
    return knot_output(static_cast<std::size_t>(whole_knot_of_[q]), q, std::nullopt).dist;
  }
  Inputs in = gather(q, std::nullopt);
  ++stats_.node_visits;
  const LocalFactor factor = local_factor(net_, q);
  const ScaledVector pi = pi_hat(factor, in.parents);
  const ScaledVector lambda = lambda_hat(factor.states, in.children, scope_.observed(q));
  return bel_hat(pi, lambda).dist;
}

IntervalVector propagate(const BeliefNetwork& net, const ActiveSet& active,
                         const Evidence& evidence, NodeId query) {
  PropagationOptions options;
  options.use_cache = false;
  options.condition_knots = false;
  Propagator propagator(net, make_scope(net, query, evidence), options);
  return propagator.run(active);
}

}  // namespace lpe
