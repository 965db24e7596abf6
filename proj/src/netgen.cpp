#include "lpe/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <numeric>
#include <string>

namespace lpe {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kStructureStream = 0;
constexpr std::uint64_t kStateStream = 1;
constexpr std::uint64_t kCptStream = 2;
constexpr std::uint64_t kExtraArcStream = 3;
constexpr std::uint64_t kExtraCptStream = 1000;

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(seed ^ splitmix64(stream))) {}

std::uint64_t Rng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t span = hi - lo;
  if (span == std::numeric_limits<std::uint64_t>::max()) return next();
  const std::uint64_t range = span + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return lo + x % range;
}

double Rng::uniform_real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::vector<double> sample_skewed_row(std::size_t states, Rng& rng) {
  if (states < 2) throw std::invalid_argument("sample_skewed_row: need at least two states");
  std::vector<double> row(states);
  for (double& x : row) {
    const auto m = static_cast<double>(rng.uniform_int(1, 10));
    const auto e = static_cast<int>(rng.uniform_int(1, 5));
    x = m * std::pow(10.0, -e);
  }
  const double sum = std::accumulate(row.begin(), row.end(), 0.0);
  for (double& x : row) x /= sum;
  return row;
}

namespace {

std::vector<std::string> state_names(std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t s = 0; s < k; ++s) out.push_back("s" + std::to_string(s));
  return out;
}

std::size_t cpt_size(const std::vector<std::size_t>& states,
                     const std::vector<std::vector<NodeId>>& parents, NodeId id,
                     std::optional<NodeId> extra = std::nullopt) {
  std::size_t size = states[id];
  for (NodeId p : parents[id]) size *= states[p];
  if (extra) size *= states[*extra];
  return size;
}

void fill_cpt(BeliefNetwork& net, NodeId id, Rng& rng) {
  std::vector<double> table;
  for (std::size_t r = 0; r < net.parent_config_count(id); ++r) {
    const auto row = sample_skewed_row(net.state_count(id), rng);
    table.insert(table.end(), row.begin(), row.end());
  }
  net.set_cpt(id, std::move(table));
}

void check_spec(const GenSpec& spec) {
  if (spec.node_count == 0) throw std::invalid_argument("node_count must be positive");
  if (spec.min_states < 2 || spec.max_states < spec.min_states) {
    throw std::invalid_argument("invalid state range");
  }
  if (spec.cpt_cap < spec.min_states) throw std::invalid_argument("cpt_cap too small");
}

// Tree skeleton and orientation, with parent lists and state counts.
struct Skeleton {
  std::vector<std::size_t> states;
  std::vector<std::vector<NodeId>> parents;
};

Skeleton polytree_skeleton(const GenSpec& spec) {
  const std::size_t n = spec.node_count;
  Rng structure(spec.seed, kStructureStream);
  Rng state_rng(spec.seed, kStateStream);

  Skeleton sk;
  sk.states.resize(n);
  for (auto& k : sk.states) k = state_rng.uniform_int(spec.min_states, spec.max_states);
  sk.parents.resize(n);
  if (n == 1) return sk;

  // Prüfer decoding.
  std::vector<NodeId> code(n - 2);
  for (auto& c : code) c = structure.uniform_int(0, n - 1);
  std::vector<std::size_t> degree(n, 1);
  for (NodeId c : code) ++degree[c];
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId c : code) {
    NodeId leaf = 0;
    while (degree[leaf] != 1) ++leaf;
    edges.push_back({leaf, c});
    --degree[leaf];
    --degree[c];
  }
  std::vector<NodeId> last;
  for (NodeId v = 0; v < n; ++v) {
    if (degree[v] == 1) last.push_back(v);
  }
  edges.push_back({last.at(0), last.at(1)});

  for (auto [u, v] : edges) {
    if (structure.uniform_int(0, 1)) std::swap(u, v);
    // Prefer u -> v; reverse, then shrink both to binary, if the cap is hit.
    if (cpt_size(sk.states, sk.parents, v, u) > spec.cpt_cap) {
      if (cpt_size(sk.states, sk.parents, u, v) <= spec.cpt_cap) {
        std::swap(u, v);
      } else {
        sk.states[u] = spec.min_states;
        sk.states[v] = spec.min_states;
        if (cpt_size(sk.states, sk.parents, v, u) > spec.cpt_cap) {
          if (cpt_size(sk.states, sk.parents, u, v) > spec.cpt_cap) {
            throw GenerationError("CPT size cap cannot accommodate the tree");
          }
          std::swap(u, v);
        }
      }
    }
    sk.parents[v].push_back(u);
  }
  return sk;
}

BeliefNetwork build(const Skeleton& sk, const std::string& name) {
  BeliefNetwork net(name);
  for (NodeId id = 0; id < sk.states.size(); ++id) {
    net.add_node("n" + std::to_string(id), state_names(sk.states[id]));
  }
  for (NodeId id = 0; id < sk.states.size(); ++id) {
    auto ps = sk.parents[id];
    std::sort(ps.begin(), ps.end());
    net.set_parents(id, ps);
  }
  return net;
}

bool reaches(const std::vector<std::vector<NodeId>>& parents, NodeId from, NodeId to) {
  // Is `from` an ancestor of `to`?
  std::vector<bool> seen(parents.size(), false);
  std::vector<NodeId> stack{to};
  while (!stack.empty()) {
    const NodeId x = stack.back();
    stack.pop_back();
    if (x == from) return true;
    if (seen[x]) continue;
    seen[x] = true;
    for (NodeId p : parents[x]) stack.push_back(p);
  }
  return false;
}

}  // namespace

BeliefNetwork gen_polytree(const GenSpec& spec) {
  check_spec(spec);
  const Skeleton sk = polytree_skeleton(spec);
  BeliefNetwork net = build(sk, "polytree-n" + std::to_string(spec.node_count) + "-s" +
                                    std::to_string(spec.seed));
  Rng cpt(spec.seed, kCptStream);
  for (NodeId id = 0; id < net.size(); ++id) fill_cpt(net, id, cpt);
  net.validate();
  return net;
}

BeliefNetwork gen_loopy(const GenSpec& spec) {
  check_spec(spec);
  if (!(spec.arc_ratio >= 1.0)) throw std::invalid_argument("arc ratio must be at least 1");
  const std::size_t n = spec.node_count;
  Skeleton sk = polytree_skeleton(spec);
  const std::size_t tree_arcs = n - 1;
  const auto target = static_cast<std::size_t>(
      std::ceil(spec.arc_ratio * static_cast<double>(n) - 1e-9));

  std::vector<std::vector<NodeId>> original = sk.parents;
  Rng arcs(spec.seed, kExtraArcStream);
  std::size_t count = tree_arcs;
  const std::size_t max_attempts = 2000 * n + 1000;
  for (std::size_t attempt = 0; count < target; ++attempt) {
    if (attempt >= max_attempts) {
      throw GenerationError("could not reach " + std::to_string(target) +
                            " arcs within the CPT size cap");
    }
    const NodeId u = arcs.uniform_int(0, n - 1);
    const NodeId v = arcs.uniform_int(0, n - 1);
    if (u == v) continue;
    const auto& pv = sk.parents[v];
    const auto& pu = sk.parents[u];
    if (std::find(pv.begin(), pv.end(), u) != pv.end()) continue;
    if (std::find(pu.begin(), pu.end(), v) != pu.end()) continue;
    if (reaches(sk.parents, v, u)) continue;  // u -> v would close a directed cycle
    if (cpt_size(sk.states, sk.parents, v, u) > spec.cpt_cap) continue;
    sk.parents[v].push_back(u);
    ++count;
  }

  BeliefNetwork net = build(sk, "loopy-n" + std::to_string(n) + "-r" +
                                    std::to_string(static_cast<int>(std::lround(spec.arc_ratio * 100))) +
                                    "-s" + std::to_string(spec.seed));
  // Tree CPTs come from the polytree stream; a node that gained parents gets
  // a fresh table from a per-node stream so lower ratios share it.
  Rng cpt(spec.seed, kCptStream);
  for (NodeId id = 0; id < n; ++id) {
    if (sk.parents[id].size() == original[id].size()) {
      fill_cpt(net, id, cpt);
    } else {
      // Keep the tree stream aligned with gen_polytree.
      for (std::size_t r = 0; r < cpt_size(sk.states, original, id) / sk.states[id]; ++r) {
        sample_skewed_row(sk.states[id], cpt);
      }
      Rng fresh(spec.seed, kExtraCptStream + id);
      fill_cpt(net, id, fresh);
    }
  }
  net.validate();
  return net;
}

BeliefNetwork generate(const GenSpec& spec) {
  return spec.topology == GenSpec::Topology::kPolytree ? gen_polytree(spec) : gen_loopy(spec);
}

Evidence sample_evidence(const BeliefNetwork& net, Rng& rng, double fraction) {
  const std::size_t n = net.size();
  const auto max_count =
      static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 1e-12));
  const std::size_t count = rng.uniform_int(0, max_count);
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  Evidence ev;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = rng.uniform_int(i, n - 1);
    std::swap(ids[i], ids[j]);
    ev[ids[i]] = rng.uniform_int(0, net.state_count(ids[i]) - 1);
  }
  return ev;
}

Evidence sample_evidence(const BeliefNetwork& net, std::uint64_t seed, double fraction) {
  Rng rng(seed, 0x65766964656e6365ULL);
  return sample_evidence(net, rng, fraction);
}

}  // namespace lpe
