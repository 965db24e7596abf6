#include "lpe/oracle.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>

#include "lpe/graph.hpp"
#include "lpe/interval.hpp"

namespace lpe {

namespace {

// Row index contribution of each parent: last parent varies fastest.
std::vector<std::size_t> parent_strides(const BeliefNetwork& net, NodeId id) {
  const auto parents = net.parents(id);
  std::vector<std::size_t> strides(parents.size());
  std::size_t stride = 1;
  for (std::size_t i = parents.size(); i-- > 0;) {
    strides[i] = stride;
    stride *= net.state_count(parents[i]);
  }
  return strides;
}

void normalize_in_place(std::vector<double>& v) {
  const double sum = std::accumulate(v.begin(), v.end(), 0.0);
  if (!(sum > 0.0)) throw ConflictingEvidence("evidence has probability zero");
  for (double& x : v) x /= sum;
}

}  // namespace

std::vector<std::vector<double>> enumerate_marginals(const BeliefNetwork& net,
                                                     const Evidence& evidence) {
  const std::size_t n = net.size();
  std::uint64_t states = 1;
  for (NodeId id = 0; id < n; ++id) {
    if (evidence.count(id)) continue;
    states *= net.state_count(id);
    if (states > kMaxEnumerationStates) {
      throw StateSpaceOverflow("joint state space exceeds 2^24 configurations");
    }
  }

  const auto order = net.topological_order();
  std::vector<std::vector<std::size_t>> strides(n);
  for (NodeId id = 0; id < n; ++id) strides[id] = parent_strides(net, id);

  std::vector<std::size_t> value(n, 0);
  std::vector<std::vector<double>> sums(n);
  for (NodeId id = 0; id < n; ++id) sums[id].assign(net.state_count(id), 0.0);

  // Depth-first over the topological order so each partial product is shared
  // by every completion of the prefix.
  std::function<void(std::size_t, double)> visit = [&](std::size_t depth, double weight) {
    if (weight == 0.0) return;
    if (depth == n) {
      for (NodeId id = 0; id < n; ++id) sums[id][value[id]] += weight;
      return;
    }
    const NodeId id = order[depth];
    const auto parents = net.parents(id);
    std::size_t row = 0;
    for (std::size_t i = 0; i < parents.size(); ++i) row += value[parents[i]] * strides[id][i];
    const auto probs = net.cpt_row(id, row);
    if (auto it = evidence.find(id); it != evidence.end()) {
      value[id] = it->second;
      visit(depth + 1, weight * probs[it->second]);
      return;
    }
    for (std::size_t s = 0; s < probs.size(); ++s) {
      value[id] = s;
      visit(depth + 1, weight * probs[s]);
    }
  };
  visit(0, 1.0);

  for (auto& v : sums) normalize_in_place(v);
  return sums;
}

std::vector<double> enumerate_marginal(const BeliefNetwork& net, const Evidence& evidence,
                                       NodeId node) {
  if (node >= net.size()) throw NetworkError("unknown node id");
  return enumerate_marginals(net, evidence).at(node);
}

std::vector<std::vector<double>> polytree_marginals(const BeliefNetwork& net,
                                                    const Evidence& evidence) {
  if (!is_polytree(net)) throw NetworkError("polytree_exact: network has an undirected cycle");
  const std::size_t n = net.size();

  std::vector<std::vector<std::size_t>> strides(n);
  for (NodeId id = 0; id < n; ++id) strides[id] = parent_strides(net, id);

  // pi_to[c][i]: message from the i-th parent of c; lambda_to[p][j]: message
  // from the j-th child of p. Both over the parent's states.
  std::vector<std::vector<std::vector<double>>> pi_to(n), lambda_to(n);
  for (NodeId id = 0; id < n; ++id) {
    pi_to[id].resize(net.parents(id).size());
    lambda_to[id].resize(net.children(id).size());
  }
  auto child_slot = [&](NodeId parent, NodeId child) {
    const auto kids = net.children(parent);
    return static_cast<std::size_t>(std::find(kids.begin(), kids.end(), child) - kids.begin());
  };
  auto parent_slot = [&](NodeId child, NodeId parent) {
    const auto ps = net.parents(child);
    return static_cast<std::size_t>(std::find(ps.begin(), ps.end(), parent) - ps.begin());
  };

  // Joint weight of a parent configuration from the incoming pi messages,
  // skipping one parent slot (or none).
  auto config_weight = [&](NodeId id, std::size_t row, std::size_t skip) {
    const auto parents = net.parents(id);
    double w = 1.0;
    for (std::size_t i = 0; i < parents.size(); ++i) {
      if (i == skip) continue;
      const std::size_t s = (row / strides[id][i]) % net.state_count(parents[i]);
      w *= pi_to[id][i][s];
    }
    return w;
  };

  auto local_lambda = [&](NodeId id, std::size_t skip_child) {
    std::vector<double> lam(net.state_count(id), 1.0);
    if (auto it = evidence.find(id); it != evidence.end()) {
      for (std::size_t s = 0; s < lam.size(); ++s) lam[s] = s == it->second ? 1.0 : 0.0;
    }
    for (std::size_t j = 0; j < net.children(id).size(); ++j) {
      if (j == skip_child) continue;
      for (std::size_t s = 0; s < lam.size(); ++s) lam[s] *= lambda_to[id][j][s];
    }
    return lam;
  };

  auto local_pi = [&](NodeId id) {
    const std::size_t k = net.state_count(id);
    std::vector<double> pi(k, 0.0);
    const std::size_t none = static_cast<std::size_t>(-1);
    for (std::size_t r = 0; r < net.parent_config_count(id); ++r) {
      const double w = config_weight(id, r, none);
      const auto row = net.cpt_row(id, r);
      for (std::size_t s = 0; s < k; ++s) pi[s] += row[s] * w;
    }
    return pi;
  };

  auto send = [&](NodeId from, NodeId to) {
    const auto kids = net.children(from);
    const bool to_child = std::find(kids.begin(), kids.end(), to) != kids.end();
    const std::size_t k = net.state_count(from);
    if (to_child) {
      auto msg = local_pi(from);
      const auto lam = local_lambda(from, child_slot(from, to));
      for (std::size_t s = 0; s < k; ++s) msg[s] *= lam[s];
      normalize_in_place(msg);
      pi_to[to][parent_slot(to, from)] = std::move(msg);
    } else {
      const std::size_t slot = parent_slot(from, to);
      const auto lam = local_lambda(from, static_cast<std::size_t>(-1));
      std::vector<double> msg(net.state_count(to), 0.0);
      for (std::size_t r = 0; r < net.parent_config_count(from); ++r) {
        const std::size_t y = (r / strides[from][slot]) % net.state_count(to);
        const double w = config_weight(from, r, slot);
        const auto row = net.cpt_row(from, r);
        double inner = 0.0;
        for (std::size_t s = 0; s < k; ++s) inner += row[s] * lam[s];
        msg[y] += inner * w;
      }
      normalize_in_place(msg);
      lambda_to[to][child_slot(to, from)] = std::move(msg);
    }
  };

  // BFS order per component; collect leaves-to-root, then distribute.
  std::vector<bool> seen(n, false);
  std::vector<NodeId> bfs_parent(n, static_cast<NodeId>(-1));
  std::vector<NodeId> order;
  for (NodeId root = 0; root < n; ++root) {
    if (seen[root]) continue;
    std::deque<NodeId> queue{root};
    seen[root] = true;
    while (!queue.empty()) {
      const NodeId id = queue.front();
      queue.pop_front();
      order.push_back(id);
      auto visit = [&](NodeId nb) {
        if (!seen[nb]) {
          seen[nb] = true;
          bfs_parent[nb] = id;
          queue.push_back(nb);
        }
      };
      for (NodeId p : net.parents(id)) visit(p);
      for (NodeId c : net.children(id)) visit(c);
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (bfs_parent[*it] != static_cast<NodeId>(-1)) send(*it, bfs_parent[*it]);
  }
  for (NodeId id : order) {
    for (NodeId p : net.parents(id)) {
      if (bfs_parent[p] == id) send(id, p);
    }
    for (NodeId c : net.children(id)) {
      if (bfs_parent[c] == id) send(id, c);
    }
  }

  std::vector<std::vector<double>> beliefs(n);
  for (NodeId id = 0; id < n; ++id) {
    auto bel = local_pi(id);
    const auto lam = local_lambda(id, static_cast<std::size_t>(-1));
    for (std::size_t s = 0; s < bel.size(); ++s) bel[s] *= lam[s];
    normalize_in_place(bel);
    beliefs[id] = std::move(bel);
  }
  return beliefs;
}

std::vector<double> polytree_exact(const BeliefNetwork& net, const Evidence& evidence,
                                   NodeId node) {
  if (node >= net.size()) throw NetworkError("unknown node id");
  return polytree_marginals(net, evidence).at(node);
}

}  // namespace lpe
