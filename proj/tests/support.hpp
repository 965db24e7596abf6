#pragma once

// Test-only oracles and builders. Nothing here calls into the code under
// test except the network container itself.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lpe/interval.hpp"
#include "lpe/network.hpp"

namespace testing {

using lpe::Arc;
using lpe::BeliefNetwork;
using lpe::Evidence;
using lpe::Interval;
using lpe::IntervalVector;
using lpe::NodeId;

inline std::vector<std::string> states(std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t s = 0; s < k; ++s) out.push_back("s" + std::to_string(s));
  return out;
}

// Adds a node with the given parents and a flat CPT (rows last-parent-fastest).
inline NodeId add(BeliefNetwork& net, const std::string& name, std::size_t k,
                  std::vector<NodeId> parents, std::vector<double> cpt) {
  const NodeId id = net.add_node(name, states(k));
  net.set_parents(id, std::move(parents));
  net.set_cpt(id, std::move(cpt));
  return id;
}

// Random CPT with rows drawn uniformly from the simplex interior.
inline std::vector<double> random_cpt(std::mt19937_64& rng, std::size_t rows, std::size_t k) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> out;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> row(k);
    double sum = 0;
    for (auto& x : row) sum += (x = u(rng));
    for (auto& x : row) out.push_back(x / sum);
  }
  return out;
}

// Exact min and max of Σ a_i b_i with a in its box and b a distribution in
// its box. The optimum of a linear function over the box-simplex polytope
// is attained at a vertex: every coordinate but one at a bound, the free one
// fixed by the sum. a is taken at its lower (upper) bounds for the minimum
// (maximum) since b >= 0.
inline Interval brute_ar_dot(const IntervalVector& a, const IntervalVector& b) {
  const std::size_t n = b.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t free = 0; free < n; ++free) {
    for (std::uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
      std::vector<double> x(n);
      double sum = 0;
      std::size_t bit = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == free) continue;
        x[i] = (mask >> bit++) & 1u ? b[i].hi : b[i].lo;
        sum += x[i];
      }
      x[free] = 1.0 - sum;
      if (x[free] < b[free].lo - 1e-12 || x[free] > b[free].hi + 1e-12) continue;
      double vlo = 0, vhi = 0;
      for (std::size_t i = 0; i < n; ++i) {
        vlo += a[i].lo * x[i];
        vhi += a[i].hi * x[i];
      }
      lo = std::min(lo, vlo);
      hi = std::max(hi, vhi);
    }
  }
  return {lo, hi};
}

// Coherent random interval vector of length n: a random distribution with
// each coordinate widened by random amounts.
inline IntervalVector random_coherent(std::mt19937_64& rng, std::size_t n, double spread = 0.3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  double sum = 0;
  for (auto& x : p) sum += (x = u(rng) + 1e-3);
  IntervalVector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = p[i] / sum;
    out[i] = {std::max(0.0, c - spread * u(rng)), std::min(1.0, c + spread * u(rng))};
    if (u(rng) < 0.1) out[i] = {c, c};
  }
  return out;
}

inline IntervalVector random_box(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(0.0, scale);
  IntervalVector out(n);
  for (auto& x : out) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    x = {a, b};
  }
  return out;
}

// Posterior marginals by visiting every joint configuration in mixed-radix
// order, with no sharing of partial products.
inline std::vector<std::vector<double>> naive_marginals(const BeliefNetwork& net,
                                                        const Evidence& evidence) {
  const std::size_t n = net.size();
  std::vector<std::size_t> value(n, 0);
  std::vector<std::vector<double>> sums(n);
  for (NodeId id = 0; id < n; ++id) sums[id].assign(net.state_count(id), 0.0);
  for (;;) {
    bool consistent = true;
    for (const auto& [id, s] : evidence) consistent = consistent && value[id] == s;
    if (consistent) {
      double p = 1.0;
      for (NodeId id = 0; id < n; ++id) {
        std::size_t row = 0;
        for (NodeId par : net.parents(id)) row = row * net.state_count(par) + value[par];
        p *= net.probability(id, row, value[id]);
      }
      for (NodeId id = 0; id < n; ++id) sums[id][value[id]] += p;
    }
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++value[i] < net.state_count(i)) break;
      value[i] = 0;
    }
    if (i == n) break;
  }
  for (auto& v : sums) {
    double total = 0;
    for (double x : v) total += x;
    for (double& x : v) x /= total;
  }
  return sums;
}

// Every simple undirected cycle of the skeleton, as a sorted arc set.
inline std::set<std::vector<Arc>> undirected_cycles(std::size_t n, const std::vector<Arc>& arcs) {
  std::vector<std::vector<std::pair<NodeId, std::size_t>>> adj(n);
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    adj[arcs[i].parent].push_back({arcs[i].child, i});
    adj[arcs[i].child].push_back({arcs[i].parent, i});
  }
  std::set<std::vector<Arc>> cycles;
  std::vector<bool> on_path(n, false);
  std::vector<std::size_t> path_arcs;
  // Cycles are rooted at their smallest node.
  auto dfs = [&](auto&& self, NodeId start, NodeId at) -> void {
    for (const auto& [next, arc] : adj[at]) {
      if (!path_arcs.empty() && arc == path_arcs.back()) continue;
      if (next == start && path_arcs.size() >= 2) {
        std::vector<Arc> cyc;
        for (std::size_t a : path_arcs) cyc.push_back(arcs[a]);
        cyc.push_back(arcs[arc]);
        std::sort(cyc.begin(), cyc.end());
        cycles.insert(cyc);
        continue;
      }
      if (next < start || on_path[next]) continue;
      on_path[next] = true;
      path_arcs.push_back(arc);
      self(self, start, next);
      path_arcs.pop_back();
      on_path[next] = false;
    }
  };
  for (NodeId s = 0; s < n; ++s) {
    on_path[s] = true;
    dfs(dfs, s, s);
    on_path[s] = false;
  }
  return cycles;
}

// Diamond with a root above and a leaf below:
// Y -> A, A -> B, A -> C, B -> D, C -> D, D -> X.
struct Diamond {
  BeliefNetwork net;
  NodeId y, a, b, c, d, x;
};

inline Diamond diamond(std::mt19937_64& rng, std::size_t k = 2) {
  Diamond f;
  f.y = add(f.net, "Y", k, {}, random_cpt(rng, 1, k));
  f.a = add(f.net, "A", k, {f.y}, random_cpt(rng, k, k));
  f.b = add(f.net, "B", k, {f.a}, random_cpt(rng, k, k));
  f.c = add(f.net, "C", k, {f.a}, random_cpt(rng, k, k));
  f.d = add(f.net, "D", k, {f.b, f.c}, random_cpt(rng, k * k, k));
  f.x = add(f.net, "X", k, {f.d}, random_cpt(rng, k, k));
  return f;
}

inline bool contains_all(const IntervalVector& bel, const std::vector<double>& exact,
                         double slack = 1e-9) {
  if (bel.size() != exact.size()) return false;
  for (std::size_t s = 0; s < bel.size(); ++s) {
    if (!bel[s].contains(exact[s], slack)) return false;
  }
  return true;
}

}  // namespace testing
