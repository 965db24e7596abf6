#include <doctest.h>

#include <random>

#include "lpe/graph.hpp"
#include "support.hpp"

using namespace lpe;
using testing::add;

namespace {

BeliefNetwork chain3() {
  BeliefNetwork net;
  const NodeId a = add(net, "A", 2, {}, {0.3, 0.7});
  const NodeId b = add(net, "B", 2, {a}, {0.9, 0.1, 0.2, 0.8});
  add(net, "C", 2, {b}, {0.6, 0.4, 0.1, 0.9});
  return net;
}

BeliefNetwork collider() {
  BeliefNetwork net;
  const NodeId a = add(net, "A", 2, {}, {0.5, 0.5});
  const NodeId b = add(net, "B", 2, {}, {0.5, 0.5});
  add(net, "C", 2, {a, b}, {0.9, 0.1, 0.5, 0.5, 0.5, 0.5, 0.1, 0.9});
  return net;
}

// Two diamonds P->Q,R->S and U->V,W->X, with S -> T -> U between them.
std::vector<Arc> twin_diamonds() {
  return {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {5, 7}, {6, 8}, {7, 8}};
}

}  // namespace

TEST_CASE("polytree recognition") {
  CHECK(is_polytree(chain3()));
  std::mt19937_64 rng(1);
  CHECK_FALSE(is_polytree(testing::diamond(rng).net));
  BeliefNetwork single;
  add(single, "A", 2, {}, {0.5, 0.5});
  CHECK(is_polytree(single));
  CHECK(is_forest(4, std::vector<Arc>{{0, 1}, {2, 3}}));
  CHECK_FALSE(is_forest(3, std::vector<Arc>{{0, 1}, {1, 2}, {0, 2}}));
}

TEST_CASE("d-separation on the three canonical trails") {
  const BeliefNetwork c = chain3();
  CHECK(d_separated(c, 0, 2, {{1, 0}}));
  CHECK_FALSE(d_separated(c, 0, 2, {}));
  const BeliefNetwork v = collider();
  CHECK(d_separated(v, 0, 1, {}));
  CHECK_FALSE(d_separated(v, 0, 1, {{2, 1}}));
  CHECK(d_separated(v, 0, 1, {{2, 1}}) == d_separated(v, 1, 0, {{2, 1}}));
}

TEST_CASE("d-separation is symmetric on random networks") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = testing::diamond(rng);
    std::uniform_int_distribution<std::size_t> pick(0, 5);
    Evidence ev{{pick(rng), 0}};
    for (NodeId a = 0; a < 6; ++a)
      for (NodeId b = 0; b < 6; ++b) CHECK(d_separated(f.net, a, b, ev) == d_separated(f.net, b, a, ev));
  }
}

TEST_CASE("knots") {
  CHECK(find_knots(chain3()).empty());

  std::mt19937_64 rng(3);
  const auto f = testing::diamond(rng);
  const auto k = find_knots(f.net);
  REQUIRE(k.size() == 1);
  CHECK(k.knots[0].nodes == std::vector<NodeId>{f.a, f.b, f.c, f.d});
  CHECK(k.knots[0].arcs.size() == 4);
  CHECK_FALSE(k.knots[0].has_arc({f.d, f.x}));

  const auto arcs = twin_diamonds();
  const auto knots = find_knots(9, arcs);
  REQUIRE(knots.size() == 2);
  // Every arc on some cycle is in exactly one knot; no other arc is.
  std::set<Arc> on_cycle;
  for (const auto& cyc : testing::undirected_cycles(9, arcs)) on_cycle.insert(cyc.begin(), cyc.end());
  std::set<Arc> in_knot;
  for (const auto& kn : knots.knots) {
    for (const Arc& a : kn.arcs) CHECK(in_knot.insert(a).second);
  }
  CHECK(in_knot == on_cycle);
  CHECK_FALSE(knots.knots[0].has_node(4));
  CHECK_FALSE(knots.knots[1].has_node(4));
}

TEST_CASE("knots agree with brute-force cycle enumeration on random graphs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng() % 6;
    std::vector<Arc> arcs;
    for (NodeId c = 1; c < n; ++c)
      for (NodeId p = 0; p < c; ++p)
        if (rng() % 3 == 0) arcs.push_back({p, c});
    const auto cycles = testing::undirected_cycles(n, arcs);
    std::set<Arc> on_cycle;
    for (const auto& cyc : cycles) on_cycle.insert(cyc.begin(), cyc.end());
    std::set<Arc> in_knot;
    const auto knots = find_knots(n, arcs);
    for (const auto& kn : knots.knots) in_knot.insert(kn.arcs.begin(), kn.arcs.end());
    CHECK(in_knot == on_cycle);
    // Cycles sharing a node land in the same knot.
    for (const auto& cyc : cycles) {
      std::size_t owner = knots.size();
      for (std::size_t i = 0; i < knots.size(); ++i)
        if (knots.knots[i].has_arc(cyc.front())) owner = i;
      REQUIRE(owner < knots.size());
      for (const Arc& a : cyc) CHECK(knots.knots[owner].has_arc(a));
    }
  }
}

TEST_CASE("relevant set") {
  const BeliefNetwork c = chain3();
  CHECK(relevant_set(c, 0, {{1, 0}}) == std::vector<NodeId>{0, 1});

  BeliefNetwork net = chain3();
  add(net, "Z", 2, {}, {0.5, 0.5});
  CHECK(relevant_set(net, 0, {{2, 1}}) == std::vector<NodeId>{0, 1, 2});
  // Barren descendants carry nothing without evidence below them.
  CHECK(relevant_set(net, 0, {}) == std::vector<NodeId>{0});
  CHECK(relevant_set(net, 2, {}) == std::vector<NodeId>{0, 1, 2});
  CHECK(relevant_mask(net, 2, {})[3] == false);
}

TEST_CASE("relevant set is within the d-connected ancestral set") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = testing::diamond(rng);
    Evidence ev;
    if (trial % 2) ev[f.x] = rng() % 2;
    if (trial % 3 == 0) ev[f.b] = rng() % 2;
    for (NodeId q = 0; q < 6; ++q) {
      if (ev.count(q)) continue;
      std::vector<NodeId> seeds{q};
      for (const auto& [id, s] : ev) seeds.push_back(id);
      const auto anc = ancestral_mask(f.net, seeds);
      const auto rel = relevant_mask(f.net, q, ev);
      CHECK(rel[q]);
      for (NodeId v = 0; v < 6; ++v) {
        if (v == q || !rel[v]) continue;
        CHECK(anc[v]);
        CHECK_FALSE(d_separated(f.net, q, v, ev));
      }
    }
  }
}
