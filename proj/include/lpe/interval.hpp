#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpe {

// Closed interval [lo, hi] over the reals. Every quantity in this library is
// nonnegative; probability-typed intervals additionally live inside [0, 1].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr Interval() = default;
  constexpr Interval(double point) : lo(point), hi(point) {}
  constexpr Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {}

  double width() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
  bool is_point() const { return lo == hi; }
  bool contains(double x, double slack = 0.0) const {
    return lo - slack <= x && x <= hi + slack;
  }
  bool contains(const Interval& other, double slack = 0.0) const {
    return lo - slack <= other.lo && other.hi <= hi + slack;
  }

  friend bool operator==(const Interval&, const Interval&) = default;
};

using IntervalVector = std::vector<Interval>;

// Raised when a distribution would have to be built from an all-zero vector,
// which only happens when the evidence has probability zero.
class ConflictingEvidence : public std::runtime_error {
 public:
  explicit ConflictingEvidence(const std::string& what)
      : std::runtime_error(what) {}
};

inline constexpr double kCoherenceTolerance = 1e-9;

Interval operator+(const Interval& x, const Interval& y);

// Product of nonnegative intervals; throws std::domain_error on a negative
// bound.
Interval operator*(const Interval& x, const Interval& y);

// Clamp into [0, 1] and repair a rounding inversion of lo > hi.
Interval clamp_probability(Interval x);

// Sum over entries, lower and upper bounds separately.
Interval total(std::span<const Interval> v);

double max_width(std::span<const Interval> v);

// Σ lo <= 1 <= Σ hi, within kCoherenceTolerance.
bool is_coherent(std::span<const Interval> v);

// True iff every entry is a point interval.
bool is_point(std::span<const Interval> v);

// n copies of [0, 1].
IntervalVector vacuous(std::size_t n);

// Point intervals for an exact vector.
IntervalVector point_vector(std::span<const double> values);

IntervalVector indicator(std::size_t n, std::size_t state);

// Bitwise equality of every bound (distinguishes -0.0 from 0.0).
bool bit_equal(std::span<const Interval> a, std::span<const Interval> b);

/// Annihilation/Reinforcement bound on Σ_i a_i b_i where b ranges over the
/// distributions inside the box b (Σ_i b_i = 1). The bound is tight: it is
/// the exact minimum and maximum of the linear program over the feasible
/// set. Requires equal lengths, nonnegative entries and a coherent b;
/// violations throw std::invalid_argument.
Interval ar_dot(std::span<const Interval> a, std::span<const Interval> b);

/// Normalizes an interval vector so that it contains p / Σ p for every point
/// selection p of the input:
///   lo_i <- lo_i / (lo_i + Σ_{j≠i} hi_j)
///   hi_i <- hi_i / (hi_i + Σ_{j≠i} lo_j)
/// The output is coherent and clamped to [0, 1]. Throws ConflictingEvidence
/// when every upper bound is zero.
IntervalVector normalize(std::span<const Interval> v);

// Same as normalize() but reports the all-zero case as nullopt.
std::optional<IntervalVector> try_normalize(std::span<const Interval> v);

// Lazily yields indices of `keys` in sorted order (ties by ascending index)
// using incremental quicksort: each call to next() performs only the
// partitioning needed to place the next element, so consuming k of n indices
// costs O(n + k log k) expected.
class IncrementalSortCursor {
 public:
  enum class Order { kAscending, kDescending };

  explicit IncrementalSortCursor(std::span<const double> keys,
                                 Order order = Order::kAscending);

  std::optional<std::size_t> next();
  std::size_t consumed() const { return position_; }
  std::size_t size() const { return index_.size(); }

 private:
  bool before(std::size_t a, std::size_t b) const;
  std::size_t partition(std::size_t begin, std::size_t end);

  std::vector<double> keys_;
  std::vector<std::size_t> index_;
  std::vector<std::size_t> pivots_;
  std::size_t position_ = 0;
  Order order_;
};

std::string to_string(const Interval& x);
std::string to_string(std::span<const Interval> v);

}  // namespace lpe
