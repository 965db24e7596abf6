#include "lpe/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace lpe {

NodeId BeliefNetwork::add_node(std::string name, std::vector<std::string> states) {
  if (find(name)) throw NetworkError("duplicate node '" + name + "'");
  if (states.size() < 2) {
    throw NetworkError("node '" + name + "' needs at least two states");
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (states[i] == states[j]) {
        throw NetworkError("node '" + name + "' repeats state '" + states[i] + "'");
      }
    }
  }
  Node node;
  node.name = std::move(name);
  node.states = std::move(states);
  node.cpt.assign(node.states.size(), 1.0 / static_cast<double>(node.states.size()));
  nodes_.push_back(std::move(node));
  children_.emplace_back();
  return nodes_.size() - 1;
}

void BeliefNetwork::set_parents(NodeId id, std::vector<NodeId> parents) {
  if (id >= nodes_.size()) throw NetworkError("unknown node id");
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (parents[i] >= nodes_.size()) throw NetworkError("unknown parent id");
    if (parents[i] == id) {
      throw NetworkError("node '" + nodes_[id].name + "' lists itself as a parent");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (parents[i] == parents[j]) {
        throw NetworkError("node '" + nodes_[id].name + "' repeats a parent");
      }
    }
  }
  for (NodeId old : nodes_[id].parents) {
    auto& kids = children_[old];
    kids.erase(std::remove(kids.begin(), kids.end(), id), kids.end());
  }
  nodes_[id].parents = std::move(parents);
  for (NodeId p : nodes_[id].parents) {
    auto& kids = children_[p];
    kids.insert(std::upper_bound(kids.begin(), kids.end(), id), id);
  }
  const std::size_t rows = parent_config_count(id);
  const std::size_t k = nodes_[id].states.size();
  nodes_[id].cpt.assign(rows * k, 1.0 / static_cast<double>(k));
}

void BeliefNetwork::set_cpt(NodeId id, std::vector<double> table) {
  if (id >= nodes_.size()) throw NetworkError("unknown node id");
  const std::size_t expected = parent_config_count(id) * nodes_[id].states.size();
  if (table.size() != expected) {
    throw NetworkError("cpt for '" + nodes_[id].name + "' has " +
                       std::to_string(table.size()) + " entries, expected " +
                       std::to_string(expected));
  }
  nodes_[id].cpt = std::move(table);
}

void BeliefNetwork::validate() const {
  topological_order();
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    const std::size_t k = n.states.size();
    const std::size_t rows = parent_config_count(id);
    if (n.cpt.size() != rows * k) {
      throw NetworkError("cpt for '" + n.name + "' has the wrong size");
    }
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (std::size_t s = 0; s < k; ++s) {
        const double p = n.cpt[r * k + s];
        if (!(p >= 0.0 && p <= 1.0)) {
          throw NetworkError("cpt for '" + n.name + "' has an entry outside [0, 1]");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        throw NetworkError("cpt row " + std::to_string(r) + " of '" + n.name +
                           "' sums to " + std::to_string(sum));
      }
    }
  }
}

std::optional<NodeId> BeliefNetwork::find(std::string_view name) const {
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    if (nodes_[id].name == name) return id;
  }
  return std::nullopt;
}

NodeId BeliefNetwork::id_of(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw NetworkError("unknown node '" + std::string(name) + "'");
}

std::optional<std::size_t> BeliefNetwork::find_state(NodeId id,
                                                     std::string_view state) const {
  const auto& states = nodes_.at(id).states;
  for (std::size_t s = 0; s < states.size(); ++s) {
    if (states[s] == state) return s;
  }
  return std::nullopt;
}

std::size_t BeliefNetwork::parent_config_count(NodeId id) const {
  std::size_t rows = 1;
  for (NodeId p : nodes_.at(id).parents) rows *= nodes_[p].states.size();
  return rows;
}

std::span<const double> BeliefNetwork::cpt_row(NodeId id, std::size_t config) const {
  const Node& n = nodes_.at(id);
  const std::size_t k = n.states.size();
  return std::span<const double>(n.cpt).subspan(config * k, k);
}

std::vector<Arc> BeliefNetwork::arcs() const {
  std::vector<Arc> out;
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    for (NodeId p : nodes_[id].parents) out.push_back({p, id});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t BeliefNetwork::arc_count() const {
  std::size_t count = 0;
  for (const auto& n : nodes_) count += n.parents.size();
  return count;
}

std::vector<NodeId> BeliefNetwork::topological_order() const {
  std::vector<std::size_t> pending(nodes_.size());
  std::deque<NodeId> ready;
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    pending[id] = nodes_[id].parents.size();
    if (pending[id] == 0) ready.push_back(id);
  }
  std::vector<NodeId> order;
  order.reserve(nodes_.size());
  while (!ready.empty()) {
    const NodeId id = ready.front();
    ready.pop_front();
    order.push_back(id);
    for (NodeId c : children_[id]) {
      if (--pending[c] == 0) ready.push_back(c);
    }
  }
  if (order.size() != nodes_.size()) {
    throw NetworkError("cycle detected in the parent graph");
  }
  return order;
}

bool BeliefNetwork::is_ancestor(NodeId ancestor, NodeId node) const {
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<NodeId> stack{node};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (id == ancestor) return true;
    if (seen[id]) continue;
    seen[id] = true;
    for (NodeId p : nodes_[id].parents) stack.push_back(p);
  }
  return false;
}

}  // namespace lpe
