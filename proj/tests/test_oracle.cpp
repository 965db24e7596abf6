#include <doctest.h>

#include <random>

#include "lpe/graph.hpp"
#include "lpe/netgen.hpp"
#include "lpe/oracle.hpp"
#include "support.hpp"

using namespace lpe;
using testing::add;

TEST_CASE("two-node chain by enumeration") {
  BeliefNetwork net;
  const NodeId a = add(net, "A", 2, {}, {0.3, 0.7});
  const NodeId b = add(net, "B", 2, {a}, {0.9, 0.1, 0.2, 0.8});
  const auto m = enumerate_marginal(net, {}, b);
  CHECK(m[0] == doctest::Approx(0.41).epsilon(1e-12));
  CHECK(polytree_exact(net, {}, b)[0] == doctest::Approx(0.41).epsilon(1e-12));
  // Bayes: P(A=t | B=t) = 0.27 / 0.41
  CHECK(enumerate_marginal(net, {{b, 0}}, a)[0] == doctest::Approx(0.27 / 0.41).epsilon(1e-12));
  CHECK(enumerate_marginal(net, {{b, 1}}, b) == std::vector<double>{0.0, 1.0});
}

TEST_CASE("uniform root and priors") {
  BeliefNetwork net;
  const NodeId a = add(net, "A", 2, {}, {0.5, 0.5});
  CHECK(enumerate_marginal(net, {}, a) == std::vector<double>{0.5, 0.5});
  const NodeId r = add(net, "R", 3, {}, {0.2, 0.3, 0.5});
  add(net, "C", 2, {r}, {0.1, 0.9, 0.5, 0.5, 0.3, 0.7});
  const auto pr = polytree_exact(net, {}, r);
  CHECK(pr[0] == doctest::Approx(0.2));
  CHECK(pr[2] == doctest::Approx(0.5));
}

TEST_CASE("deterministic chain propagates the indicator") {
  BeliefNetwork net;
  const NodeId a = add(net, "A", 2, {}, {1.0, 0.0});
  const NodeId b = add(net, "B", 2, {a}, {0.0, 1.0, 1.0, 0.0});
  const NodeId c = add(net, "C", 2, {b}, {0.0, 1.0, 1.0, 0.0});
  CHECK(polytree_exact(net, {}, c) == std::vector<double>{1.0, 0.0});
  CHECK(enumerate_marginal(net, {}, b) == std::vector<double>{0.0, 1.0});
  CHECK_THROWS_AS(enumerate_marginals(net, {{c, 1}}), ConflictingEvidence);
}

TEST_CASE("three oracles agree on random polytrees") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    GenSpec spec;
    spec.seed = seed;
    spec.node_count = 2 + seed % 11;
    const BeliefNetwork net = generate(spec);
    const Evidence ev = sample_evidence(net, seed);
    std::vector<std::vector<double>> e;
    try {
      e = enumerate_marginals(net, ev);
    } catch (const ConflictingEvidence&) {
      continue;
    }
    const auto p = polytree_marginals(net, ev);
    const auto nv = testing::naive_marginals(net, ev);
    for (NodeId id = 0; id < net.size(); ++id) {
      for (std::size_t s = 0; s < e[id].size(); ++s) {
        CHECK(std::abs(e[id][s] - p[id][s]) <= 1e-9);
        CHECK(std::abs(e[id][s] - nv[id][s]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("enumeration matches the naive oracle on loopy networks") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = testing::diamond(rng, 2 + trial % 2);
    const Evidence ev{{f.x, 0}};
    const auto e = enumerate_marginals(f.net, ev);
    const auto nv = testing::naive_marginals(f.net, ev);
    for (NodeId id = 0; id < 6; ++id)
      for (std::size_t s = 0; s < e[id].size(); ++s) CHECK(std::abs(e[id][s] - nv[id][s]) <= 1e-12);
    CHECK_THROWS_AS(polytree_marginals(f.net, ev), NetworkError);
  }
}

TEST_CASE("state space limit") {
  BeliefNetwork net;
  for (int i = 0; i < 13; ++i) add(net, "n" + std::to_string(i), 4, {}, {0.25, 0.25, 0.25, 0.25});
  CHECK_THROWS_AS(enumerate_marginals(net, {}), StateSpaceOverflow);
}
