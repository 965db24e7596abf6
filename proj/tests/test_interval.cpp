#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "lpe/interval.hpp"
#include "support.hpp"

using namespace lpe;

TEST_CASE("interval addition") {
  const Interval s = Interval{0.1, 0.2} + Interval{0.3, 0.5};
  CHECK(s.lo == doctest::Approx(0.4));
  CHECK(s.hi == doctest::Approx(0.7));
  CHECK(Interval{0.0} + Interval{0.2, 0.6} == Interval{0.2, 0.6});
  CHECK(Interval{0.25} + Interval{0.25} == Interval{0.5});
}

TEST_CASE("interval multiplication") {
  CHECK(Interval{1.0} * Interval{0.3, 0.6} == Interval{0.3, 0.6});
  CHECK(Interval{0.0, 1.0} * Interval{0.3, 0.6} == Interval{0.0, 0.6});
  // Corner products of [0.2,0.4] x [0.5,0.5]: 0.1, 0.1, 0.2, 0.2.
  const Interval p = Interval{0.2, 0.4} * Interval{0.5};
  CHECK(p.lo == doctest::Approx(0.1));
  CHECK(p.hi == doctest::Approx(0.2));
  CHECK_THROWS_AS((Interval{-0.1, 0.2} * Interval{0.5}), std::domain_error);
}

TEST_CASE("vacuous vectors") {
  CHECK(vacuous(2) == IntervalVector{{0, 1}, {0, 1}});
  CHECK(vacuous(1) == IntervalVector{{0, 1}});
  CHECK(vacuous(4).size() == 4);
  for (const auto& x : vacuous(4)) CHECK(x == Interval{0, 1});
  CHECK_THROWS(vacuous(0));
}

TEST_CASE("ar_dot on point inputs is the dot product") {
  const IntervalVector a{{0.2}, {0.8}}, b{{0.5}, {0.5}};
  const Interval r = ar_dot(a, b);
  CHECK(r.lo == doctest::Approx(0.5));
  CHECK(r.hi == doctest::Approx(0.5));
}

TEST_CASE("ar_dot against a vacuous distribution is min/max") {
  const IntervalVector a{{0.1, 0.2}, {0.6, 0.7}};
  const Interval r = ar_dot(a, vacuous(2));
  CHECK(r == Interval{0.1, 0.7});
}

TEST_CASE("ar_dot matches vertex enumeration on a worked pair") {
  const IntervalVector a{{0.1, 0.3}, {0.5, 0.9}}, b{{0.2, 0.6}, {0.5, 0.8}};
  const Interval oracle = testing::brute_ar_dot(a, b);
  CHECK(oracle.lo == doctest::Approx(0.30));
  CHECK(oracle.hi == doctest::Approx(0.78));
  const Interval r = ar_dot(a, b);
  CHECK(r.lo == doctest::Approx(oracle.lo).epsilon(1e-12));
  CHECK(r.hi == doctest::Approx(oracle.hi).epsilon(1e-12));
}

TEST_CASE("ar_dot rejects bad input") {
  CHECK_THROWS_AS(ar_dot(IntervalVector{{0.5}}, IntervalVector{{0.5}, {0.5}}), std::invalid_argument);
  // Upper bounds sum below one.
  CHECK_THROWS_AS(ar_dot(IntervalVector{{0.5}, {0.5}}, IntervalVector{{0.1, 0.2}, {0.1, 0.2}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ar_dot(IntervalVector{{-0.5, 0.1}, {0.5}}, IntervalVector{{0.5}, {0.5}}),
                  std::invalid_argument);
}

TEST_CASE("normalize worked example") {
  const IntervalVector n = normalize(IntervalVector{{0.2, 0.4}, {0.3, 0.5}});
  CHECK(n[0].lo == doctest::Approx(0.2 / 0.7));
  CHECK(n[0].hi == doctest::Approx(0.4 / 0.7));
  CHECK(n[1].lo == doctest::Approx(0.3 / 0.7));
  CHECK(n[1].hi == doctest::Approx(0.5 / 0.7));
  CHECK(n[0].lo == doctest::Approx(0.2857).epsilon(1e-3));
  CHECK(n[1].hi == doctest::Approx(0.7143).epsilon(1e-3));
}

TEST_CASE("normalize fixed points") {
  const IntervalVector dist{{0.3}, {0.7}};
  const IntervalVector n = normalize(dist);
  CHECK(n[0].lo == doctest::Approx(0.3));
  CHECK(n[1].hi == doctest::Approx(0.7));
  CHECK(normalize(vacuous(2)) == vacuous(2));
  CHECK(is_coherent(normalize(IntervalVector{{0.1, 0.9}, {0.0, 0.2}, {0.4, 0.4}})));
}

TEST_CASE("normalize of an all-zero vector is conflicting evidence") {
  CHECK_THROWS_AS(normalize(IntervalVector{{0.0}, {0.0}}), ConflictingEvidence);
  CHECK_FALSE(try_normalize(IntervalVector{{0.0}, {0.0}}).has_value());
  // One entry with a zero lower bound and everything else zero.
  const IntervalVector n = normalize(IntervalVector{{0.0, 0.5}, {0.0}});
  CHECK(n[0].hi == doctest::Approx(1.0));
  CHECK(n[1] == Interval{0.0});
}

TEST_CASE("coherence and points") {
  CHECK(is_coherent(IntervalVector{{0.2, 0.6}, {0.5, 0.8}}));
  CHECK_FALSE(is_coherent(IntervalVector{{0.6, 0.7}, {0.5, 0.8}}));
  CHECK_FALSE(is_coherent(IntervalVector{{0.1, 0.2}, {0.1, 0.3}}));
  CHECK(is_point(indicator(3, 1)));
  CHECK(indicator(3, 1)[1] == Interval{1.0});
  CHECK(max_width(IntervalVector{{0.1, 0.3}, {0.2, 0.9}}) == doctest::Approx(0.7));
}

TEST_CASE("bit_equal separates signed zeros") {
  CHECK(bit_equal(IntervalVector{{0.0, 1.0}}, IntervalVector{{0.0, 1.0}}));
  CHECK_FALSE(bit_equal(IntervalVector{{0.0, 1.0}}, IntervalVector{{-0.0, 1.0}}));
  CHECK_FALSE(bit_equal(IntervalVector{{0.0, 1.0}}, IntervalVector{{0.0, 0.5}}));
}

TEST_CASE("incremental sort cursor") {
  SUBCASE("first of three") {
    const std::vector<double> keys{3, 1, 2};
    IncrementalSortCursor cur(keys);
    CHECK(cur.next() == std::optional<std::size_t>{1});
  }
  SUBCASE("singleton") {
    const std::vector<double> keys{5};
    IncrementalSortCursor cur(keys);
    CHECK(cur.next() == std::optional<std::size_t>{0});
    CHECK_FALSE(cur.next().has_value());
  }
  SUBCASE("full consumption matches a stable sort") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> d(0, 50);  // plenty of ties
    std::vector<double> keys(1000);
    for (auto& k : keys) k = d(rng);
    for (auto order : {IncrementalSortCursor::Order::kAscending,
                       IncrementalSortCursor::Order::kDescending}) {
      std::vector<std::size_t> expected(keys.size());
      std::iota(expected.begin(), expected.end(), 0);
      std::stable_sort(expected.begin(), expected.end(), [&](std::size_t a, std::size_t b) {
        return order == IncrementalSortCursor::Order::kAscending ? keys[a] < keys[b]
                                                                 : keys[a] > keys[b];
      });
      IncrementalSortCursor cur(keys, order);
      std::vector<std::size_t> got;
      while (auto i = cur.next()) got.push_back(*i);
      CHECK(got == expected);
      CHECK(cur.consumed() == keys.size());
    }
  }
}
