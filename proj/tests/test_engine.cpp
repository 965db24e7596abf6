#include <doctest.h>

#include <random>

#include "lpe/engine.hpp"
#include "lpe/netgen.hpp"
#include "lpe/oracle.hpp"
#include "support.hpp"

using namespace lpe;
using testing::add;

namespace {

BeliefNetwork chain(std::size_t n, std::mt19937_64& rng) {
  BeliefNetwork net;
  add(net, "c0", 2, {}, testing::random_cpt(rng, 1, 2));
  for (NodeId i = 1; i < n; ++i) add(net, "c" + std::to_string(i), 2, {i - 1}, testing::random_cpt(rng, 2, 2));
  return net;
}

Message msg(IntervalVector v) { return Message{MessageKind::kPi, {0, 1}, {std::move(v), Interval{1.0}}, false}; }

}  // namespace

TEST_CASE("message cache reports changes") {
  MessageCache cache;
  const MessageCache::Key key{0, 1, -1};
  CHECK(cache.update(key, msg({{0.2, 0.6}, {0.4, 0.8}})));
  CHECK_FALSE(cache.update(key, msg({{0.2, 0.6}, {0.4, 0.8}})));
  CHECK(cache.update(key, msg({{0.3, 0.6}, {0.4, 0.7}})));
  CHECK(cache.size() == 1);
  CHECK(cache.update({0, 1, 0}, msg({{0.3, 0.6}, {0.4, 0.7}})));
  CHECK(cache.size() == 2);

  const std::vector<IntervalVector> inputs{{{0.5, 0.5}, {0.5, 0.5}}};
  cache.update(key, msg({{0.5, 0.5}, {0.5, 0.5}}), inputs);
  CHECK(cache.reusable(key, inputs) != nullptr);
  CHECK(cache.reusable(key, {{{0.5, 0.5}, {0.4, 0.6}}}) == nullptr);
  cache.clear();
  CHECK(cache.find(key) == nullptr);
}

TEST_CASE("expansion along a chain") {
  std::mt19937_64 rng(1);
  const BeliefNetwork net = chain(4, rng);
  ActiveSet active(net.size(), 3);
  CHECK(active.nodes() == std::vector<NodeId>{3});
  auto step = expand(active, Strategy::breadth_first(), net, 3, {});
  CHECK_FALSE(step.fixed_point);
  CHECK(step.active.nodes() == std::vector<NodeId>{3, 2});
  CHECK(step.active.has_arc({2, 3}));
  std::size_t rounds = 1;
  while (!step.fixed_point) {
    step = expand(step.active, Strategy::breadth_first(), net, 3, {});
    ++rounds;
  }
  CHECK(rounds == 4);
  CHECK(step.active.node_count() == 4);
  CHECK(step.active.arcs().size() == 3);
}

TEST_CASE("active set rejects arcs to outside nodes") {
  ActiveSet active(3, 0);
  CHECK_THROWS(active.add_arc({0, 1}));
  active.add_node(1);
  active.add_arc({0, 1});
  CHECK(active.has_arc({0, 1}));
}

TEST_CASE("no-loops leaves B->D out of the diamond") {
  std::mt19937_64 rng(2);
  const auto f = testing::diamond(rng);
  const Evidence ev{{f.x, 0}};
  const QueryScope scope = make_scope(f.net, f.c, ev);
  ActiveSet active(f.net.size(), f.c);
  bool fixed = false;
  while (!fixed) {
    auto next = expand(active, Strategy::no_loops(), scope);
    fixed = next.fixed_point;
    active = std::move(next.active);
  }
  CHECK(active.node_count() == 6);
  CHECK_FALSE(active.has_arc({f.b, f.d}));
  CHECK(active.excluded_arcs().count({f.b, f.d}) == 1);
  CHECK(active.arcs().size() == 5);

  // Breadth-first takes the whole loop; delayed takes it late.
  ActiveSet all(f.net.size(), f.c);
  for (fixed = false; !fixed;) {
    auto next = expand(all, Strategy::breadth_first(), scope);
    fixed = next.fixed_point;
    all = std::move(next.active);
  }
  CHECK(all.arcs().size() == 6);
  ActiveSet late(f.net.size(), f.c);
  std::size_t rounds = 0;
  for (fixed = false; !fixed; ++rounds) {
    auto next = expand(late, Strategy::delayed_loops(3), scope);
    fixed = next.fixed_point;
    late = std::move(next.active);
  }
  CHECK(late.arcs().size() == 6);
  CHECK(late.pending_arcs().empty());
}

TEST_CASE("d-separated nodes are never added") {
  std::mt19937_64 rng(3);
  const BeliefNetwork net = chain(5, rng);
  const Evidence ev{{2, 1}};
  ActiveSet active(net.size(), 0);
  for (bool fixed = false; !fixed;) {
    auto next = expand(active, Strategy::breadth_first(), net, 0, ev);
    fixed = next.fixed_point;
    active = std::move(next.active);
  }
  CHECK(active.node_count() == 3);
  CHECK_FALSE(active.has_node(3));
}

TEST_CASE("propagate on a chain") {
  BeliefNetwork net;
  const NodeId a = add(net, "A", 2, {}, {0.3, 0.7});
  const NodeId b = add(net, "B", 2, {a}, {0.9, 0.1, 0.2, 0.8});
  ActiveSet only(net.size(), b);
  const auto first = propagate(net, only, {}, b);
  CHECK(first[0].contains(0.41));
  CHECK(first[0].lo <= 0.2 + 1e-12);
  CHECK(first[0].hi >= 0.9 - 1e-12);
  ActiveSet full = only;
  full.add_node(a);
  full.add_arc({a, b});
  const auto exact = propagate(net, full, {}, b);
  CHECK(exact[0].lo == doctest::Approx(0.41));
  CHECK(exact[0].hi == doctest::Approx(0.41));
  // Evidence on the query itself.
  const auto ind = propagate(net, only, {{b, 1}}, b);
  CHECK(bit_equal(ind, indicator(2, 1)));
}

TEST_CASE("propagate rejects an active cycle") {
  std::mt19937_64 rng(4);
  const auto f = testing::diamond(rng);
  ActiveSet active(f.net.size(), f.d);
  for (NodeId id : {f.a, f.b, f.c}) active.add_node(id);
  for (Arc arc : {Arc{f.a, f.b}, Arc{f.a, f.c}, Arc{f.b, f.d}, Arc{f.c, f.d}}) active.add_arc(arc);
  CHECK_THROWS_AS(propagate(f.net, active, {}, f.d), std::invalid_argument);
}

TEST_CASE("stop criteria") {
  const IntervalVector bel{{0.86, 0.9}, {0.1, 0.14}};
  std::optional<bool> answer;
  CHECK(criterion_met(TargetWidth{0.05}, bel));
  CHECK_FALSE(criterion_met(TargetWidth{0.03}, bel));
  CHECK(criterion_met(Threshold{0, Threshold::Direction::kGreater, 0.85}, bel, &answer));
  CHECK(answer == true);
  CHECK(criterion_met(Threshold{0, Threshold::Direction::kGreater, 0.9}, bel, &answer));
  CHECK(answer == false);
  CHECK_FALSE(criterion_met(Threshold{0, Threshold::Direction::kGreater, 0.88}, bel, &answer));
  CHECK_FALSE(answer.has_value());
  CHECK(criterion_met(Threshold{1, Threshold::Direction::kLess, 0.15}, bel, &answer));
  CHECK(answer == true);
}

TEST_CASE("anytime loop") {
  std::mt19937_64 rng(5);
  const BeliefNetwork net = chain(6, rng);

  SUBCASE("width 1 is met at once") {
    const auto r = answer_query(net, 5, {}, Strategy::breadth_first(), TargetWidth{1.0});
    CHECK(r.status == QueryStatus::kSatisfied);
    CHECK(r.iterations.size() == 1);
  }
  SUBCASE("width 0 on a polytree reaches the exact point") {
    const Evidence ev{{0, 1}};
    const auto r = answer_query(net, 4, ev, Strategy::breadth_first(), TargetWidth{0.0});
    const auto exact = enumerate_marginal(net, ev, 4);
    CHECK(r.width() <= 1e-9);
    CHECK(r.iterations.back().active_nodes == 5);
    for (std::size_t s = 0; s < 2; ++s) CHECK(std::abs(r.bel[s].midpoint() - exact[s]) <= 1e-9);
  }
  SUBCASE("budgets") {
    Budget one;
    one.max_iterations = 1;
    const auto r = answer_query(net, 5, {{0, 0}}, Strategy::breadth_first(), TargetWidth{0.0}, one);
    CHECK(r.status == QueryStatus::kBudgetExhausted);
    CHECK(r.iterations.size() == 1);
    Budget none;
    none.time = std::chrono::milliseconds(0);
    const auto z = answer_query(net, 5, {{0, 0}}, Strategy::breadth_first(), TargetWidth{0.0}, none);
    CHECK(z.status == QueryStatus::kBudgetExhausted);
    CHECK(z.bel.size() == 2);
  }
}

TEST_CASE("threshold stops as soon as it is decided") {
  // A long chain of near-copies: the query leans towards state 0.
  BeliefNetwork net;
  add(net, "c0", 2, {}, {0.95, 0.05});
  for (NodeId i = 1; i < 6; ++i) add(net, "c" + std::to_string(i), 2, {i - 1}, {0.99, 0.01, 0.02, 0.98});
  const auto exact = enumerate_marginal(net, {}, 5);
  REQUIRE(exact[0] > 0.85);
  const Threshold t{0, Threshold::Direction::kGreater, 0.85};
  const auto r = answer_query(net, 5, {}, Strategy::breadth_first(), t);
  CHECK(r.status == QueryStatus::kSatisfied);
  CHECK(r.threshold_answer == true);
  CHECK(r.bel[0].lo > 0.85);
  for (std::size_t i = 0; i + 1 < r.iterations.size(); ++i) {
    CHECK(r.iterations[i].bel[0].lo <= 0.85);
    CHECK(r.iterations[i].bel[0].hi > 0.85);
  }
}

TEST_CASE("no-loops saturates on a diamond") {
  std::mt19937_64 rng(6);
  const auto f = testing::diamond(rng);
  const auto r = answer_query(f.net, f.c, {{f.x, 1}}, Strategy::no_loops(), TargetWidth{0.0});
  CHECK(r.status == QueryStatus::kSaturated);
  CHECK(testing::contains_all(r.bel, enumerate_marginal(f.net, {{f.x, 1}}, f.c)));
}

TEST_CASE("cache does not change results") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    GenSpec spec;
    spec.seed = seed;
    spec.node_count = 12;
    spec.topology = seed % 2 ? GenSpec::Topology::kPolytree : GenSpec::Topology::kLoopy;
    spec.arc_ratio = 1.2;
    const BeliefNetwork net = generate(spec);
    const Evidence ev = sample_evidence(net, seed);
    NodeId q = 0;
    while (ev.count(q)) ++q;
    QueryOptions with, without;
    without.use_cache = false;
    for (const Strategy& st : {Strategy::breadth_first(), Strategy::delayed_loops(2)}) {
      const auto a = answer_query(net, q, ev, st, TargetWidth{0.0}, {}, with);
      const auto b = answer_query(net, q, ev, st, TargetWidth{0.0}, {}, without);
      REQUIRE(a.iterations.size() == b.iterations.size());
      for (std::size_t i = 0; i < a.iterations.size(); ++i) {
        CHECK(bit_equal(a.iterations[i].bel, b.iterations[i].bel));
      }
      CHECK(a.node_visits <= b.node_visits);
    }
  }
}

TEST_CASE("iteration callback sees every record") {
  std::mt19937_64 rng(8);
  const BeliefNetwork net = chain(5, rng);
  std::size_t seen = 0;
  QueryOptions opts;
  opts.on_iteration = [&](const IterationRecord& rec) {
    ++seen;
    CHECK(rec.active_nodes == seen);
  };
  const auto r = answer_query(net, 4, {{0, 0}}, Strategy::breadth_first(), TargetWidth{0.0}, {}, opts);
  CHECK(seen == r.iterations.size());
  CHECK(std::string(to_string(r.status)) == "satisfied");
}
