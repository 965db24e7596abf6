#include "lpe/loops.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace lpe {

KnotContainment contained_knots(const KnotDecomposition& knots, const ActiveSet& active) {
  KnotContainment out;
  for (std::size_t k = 0; k < knots.size(); ++k) {
    const Knot& knot = knots.knots[k];
    std::size_t nodes = 0, arcs = 0;
    for (NodeId id : knot.nodes) nodes += active.has_node(id) ? 1 : 0;
    for (const Arc& a : knot.arcs) arcs += active.has_arc(a) ? 1 : 0;
    if (nodes == knot.nodes.size() && arcs == knot.arcs.size()) {
      out.whole.push_back(k);
    } else if (nodes > 0) {
      out.partial.push_back(k);
    }
  }
  return out;
}

std::vector<NodeId> select_cutset(const Knot& knot, std::span<const NodeId> preclamped) {
  const std::set<NodeId> fixed(preclamped.begin(), preclamped.end());
  std::vector<Arc> remaining;
  for (const Arc& a : knot.arcs) {
    if (!fixed.count(a.parent)) remaining.push_back(a);
  }

  std::vector<NodeId> chosen;
  for (;;) {
    // Peel nodes of degree <= 1; what survives is the 2-core.
    std::map<NodeId, std::size_t> degree;
    for (const Arc& a : remaining) {
      ++degree[a.parent];
      ++degree[a.child];
    }
    std::set<NodeId> core;
    for (const auto& [id, d] : degree) core.insert(id);
    for (bool changed = true; changed;) {
      changed = false;
      for (auto it = core.begin(); it != core.end();) {
        if (degree[*it] <= 1) {
          for (const Arc& a : remaining) {
            if (a.parent == *it && core.count(a.child)) --degree[a.child];
            if (a.child == *it && core.count(a.parent)) --degree[a.parent];
          }
          degree[*it] = 0;
          it = core.erase(it);
          changed = true;
        } else {
          ++it;
        }
      }
    }
    if (core.empty()) break;

    std::map<NodeId, std::size_t> in, out;
    for (const Arc& a : remaining) {
      if (core.count(a.parent) && core.count(a.child)) {
        ++out[a.parent];
        ++in[a.child];
      }
    }
    auto better = [&](NodeId a, NodeId b) {
      const std::size_t da = in[a] + out[a], db = in[b] + out[b];
      return da != db ? da > db : a < b;
    };
    std::optional<NodeId> best, best_preferred;
    for (NodeId id : core) {
      if (out[id] == 0 || fixed.count(id)) continue;
      if (!best || better(id, *best)) best = id;
      if (in[id] <= 1 && (!best_preferred || better(id, *best_preferred))) best_preferred = id;
    }
    const NodeId pick = best_preferred ? *best_preferred : *best;
    chosen.push_back(pick);
    std::erase_if(remaining, [&](const Arc& a) { return a.parent == pick; });
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

namespace {

// Evaluates one cutset instance: the knot with every clamped node's outgoing
// knot arcs removed is a forest, and each message is computed once.
class InstanceSolver {
 public:
  InstanceSolver(const BeliefNetwork& net, const Knot& knot,
                 const std::map<NodeId, std::vector<const BoundaryMessage*>>& boundary,
                 const std::map<NodeId, std::size_t>& clamp,
                 const std::map<NodeId, std::size_t>& observed)
      : net_(net), knot_(knot), boundary_(boundary), clamp_(clamp), observed_(observed) {}

  ScaledVector message(NodeId from, NodeId to) {
    ++visits;
    const LocalFactor factor = local_factor(net_, from, clamped_parents(from));
    Local in = gather(from, factor, to);
    const auto obs = observed(from);
    const auto ps = factor.parents;
    const auto slot = std::find(ps.begin(), ps.end(), to);
    if (slot == ps.end()) {
      return pi_msg(pi_hat(factor, in.parents), in.children, obs);
    }
    const std::size_t s = static_cast<std::size_t>(slot - ps.begin());
    return lambda_msg(factor, s, lambda_hat(factor.states, in.children, obs), in.parents);
  }

  ScaledVector belief(NodeId node) {
    ++visits;
    const LocalFactor factor = local_factor(net_, node, clamped_parents(node));
    Local in = gather(node, factor, std::nullopt);
    return bel_hat(pi_hat(factor, in.parents), lambda_hat(factor.states, in.children, observed(node)));
  }

  std::size_t visits = 0;

 private:
  struct Local {
    std::vector<ScaledVector> parents;
    std::vector<ScaledVector> children;
  };

  std::optional<std::size_t> observed(NodeId id) const {
    auto it = clamp_.find(id);
    if (it == clamp_.end()) return std::nullopt;
    return it->second;
  }

  std::map<NodeId, std::size_t> clamped_parents(NodeId id) const {
    std::map<NodeId, std::size_t> out;
    for (NodeId p : net_.parents(id)) {
      if (auto it = clamp_.find(p); it != clamp_.end()) out.insert(*it);
    }
    return out;
  }

  const IntervalVector* boundary_value(const Arc& arc, NodeId knot_node) const {
    auto it = boundary_.find(knot_node);
    if (it == boundary_.end()) return nullptr;
    for (const BoundaryMessage* b : it->second) {
      if (b->arc == arc) return &b->value;
    }
    return nullptr;
  }

  Local gather(NodeId node, const LocalFactor& factor, std::optional<NodeId> exclude) {
    Local in;
    for (std::size_t i = 0; i < factor.parents.size(); ++i) {
      const NodeId p = factor.parents[i];
      if (exclude && p == *exclude) {
        in.parents.push_back(ScaledVector{vacuous(factor.parent_states[i])});
      } else if (knot_.has_node(p)) {
        in.parents.push_back(message(p, node));
      } else if (const auto* v = boundary_value(Arc{p, node}, node)) {
        in.parents.push_back(ScaledVector{*v});
      } else {
        in.parents.push_back(ScaledVector{vacuous(factor.parent_states[i])});
      }
    }
    if (!observed(node)) {
      for (const Arc& a : knot_.arcs) {
        if (a.parent != node || (exclude && a.child == *exclude)) continue;
        in.children.push_back(message(a.child, node));
      }
    }
    // A λ message into an observed node is only read at the observed state,
    // the same factor in every instance, so it does not affect the weights.
    auto it = boundary_.find(node);
    if (it != boundary_.end() && !observed_.count(node)) {
      for (const BoundaryMessage* b : it->second) {
        if (b->arc.parent != node || (exclude && b->arc.child == *exclude)) continue;
        in.children.push_back(ScaledVector{b->value});
      }
    }
    return in;
  }

  const BeliefNetwork& net_;
  const Knot& knot_;
  const std::map<NodeId, std::vector<const BoundaryMessage*>>& boundary_;
  const std::map<NodeId, std::size_t>& clamp_;
  const std::map<NodeId, std::size_t>& observed_;
};

}  // namespace

ConditioningResult condition_knot(const BeliefNetwork& net, const Evidence& evidence,
                                  const ConditioningRequest& request,
                                  const ConditioningOptions& options) {
  if (!request.knot) throw std::invalid_argument("condition_knot: no knot");
  const Knot& knot = *request.knot;
  if (!knot.has_node(request.target)) throw std::invalid_argument("target is not in the knot");

  std::map<NodeId, std::size_t> fixed;
  for (const auto& [id, state] : evidence) {
    if (knot.has_node(id)) fixed[id] = state;
  }
  std::uint64_t count = 1;
  for (NodeId c : request.cutset) {
    if (!knot.has_node(c) || fixed.count(c)) {
      throw std::invalid_argument("cutset node must be an unobserved knot node");
    }
    count *= net.state_count(c);
    if (count > options.max_instances) {
      throw CutsetOverflow("cutset has more than " + std::to_string(options.max_instances) +
                           " instances");
    }
  }

  std::set<NodeId> clamped_ids(request.cutset.begin(), request.cutset.end());
  for (const auto& [id, state] : fixed) clamped_ids.insert(id);
  std::vector<Arc> forest;
  for (const Arc& a : knot.arcs) {
    if (!clamped_ids.count(a.parent)) forest.push_back(a);
  }
  if (!is_forest(net.size(), forest)) {
    throw std::invalid_argument("cutset leaves a loop in the knot");
  }

  std::map<NodeId, std::vector<const BoundaryMessage*>> boundary;
  for (const BoundaryMessage& b : request.boundary) {
    const bool in_parent = knot.has_node(b.arc.parent), in_child = knot.has_node(b.arc.child);
    if (in_parent == in_child) throw std::invalid_argument("boundary arc must cross the knot");
    boundary[in_parent ? b.arc.parent : b.arc.child].push_back(&b);
  }

  // Components of the split knot: the one holding the target produces the
  // output, each other one contributes its total mass to the weight.
  std::map<NodeId, NodeId> root;
  for (NodeId id : knot.nodes) root[id] = id;
  auto find = [&](NodeId x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  for (const Arc& a : forest) {
    const NodeId ra = find(a.parent), rb = find(a.child);
    if (ra != rb) root[std::max(ra, rb)] = std::min(ra, rb);
  }
  // A component whose tables never see a cutset value has the same mass in
  // every instance and is left out of the weights.
  const std::set<NodeId> cutset(request.cutset.begin(), request.cutset.end());
  std::set<NodeId> varying;
  for (NodeId id : knot.nodes) {
    bool depends = cutset.count(id) > 0;
    for (NodeId p : net.parents(id)) depends = depends || cutset.count(p) > 0;
    if (depends) varying.insert(find(id));
  }
  std::vector<NodeId> others;
  for (NodeId id : knot.nodes) {
    if (find(id) == id && find(request.target) != id && varying.count(id)) others.push_back(id);
  }

  std::size_t out_states = net.state_count(request.target);
  if (request.exit_peer) {
    const auto ps = net.parents(request.target);
    if (std::find(ps.begin(), ps.end(), *request.exit_peer) != ps.end()) {
      out_states = net.state_count(*request.exit_peer);
    }
  }

  ConditioningResult result;
  result.table.cutset = request.cutset;
  std::vector<std::size_t> states(request.cutset.size(), 0);
  IntervalVector weights;
  for (std::uint64_t i = 0; i < count; ++i) {
    check_deadline(options.deadline);
    std::map<NodeId, std::size_t> clamp = fixed;
    for (std::size_t k = 0; k < states.size(); ++k) clamp[request.cutset[k]] = states[k];

    InstanceSolver solver(net, knot, boundary, clamp, fixed);
    CutsetAssignment entry{states, Interval{0.0}, vacuous(out_states)};
    try {
      const ScaledVector out = request.exit_peer
                                   ? solver.message(request.target, *request.exit_peer)
                                   : solver.belief(request.target);
      Interval w = out.scale;
      for (NodeId rep : others) w = w * solver.belief(rep).scale;
      entry.weight = w;
      entry.value = out.dist;
    } catch (const ConflictingEvidence&) {
      // This assignment cannot occur together with the evidence.
    }
    result.node_visits += solver.visits;
    weights.push_back(entry.weight);
    result.table.instances.push_back(std::move(entry));

    for (std::size_t k = states.size(); k-- > 0;) {
      if (++states[k] < net.state_count(request.cutset[k])) break;
      states[k] = 0;
    }
  }

  auto normalized = try_normalize(weights);
  if (!normalized) throw ConflictingEvidence("evidence inside the knot has probability zero");
  IntervalVector mixed(out_states);
  IntervalVector column(count);
  for (std::size_t x = 0; x < out_states; ++x) {
    for (std::size_t c = 0; c < count; ++c) column[c] = result.table.instances[c].value[x];
    mixed[x] = ar_dot(column, *normalized);
  }
  for (std::size_t c = 0; c < count; ++c) result.table.instances[c].weight = (*normalized)[c];
  result.value = normalize(mixed);
  return result;
}

IntervalVector propagate_mixed(const BeliefNetwork& net, const ActiveSet& active,
                               const Evidence& evidence, NodeId query) {
  PropagationOptions options;
  options.use_cache = false;
  Propagator propagator(net, make_scope(net, query, evidence), options);
  return propagator.run(active);
}

}  // namespace lpe
