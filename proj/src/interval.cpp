#include "lpe/interval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lpe {

namespace {

Interval ordered(double lo, double hi) {
  if (lo > hi) std::swap(lo, hi);
  return {lo, hi};
}

void require_nonnegative(std::span<const Interval> v, const char* what) {
  for (const auto& x : v) {
    if (!(x.lo >= 0.0) || !(x.hi >= x.lo)) {
      throw std::invalid_argument(std::string(what) +
                                  ": entries must satisfy 0 <= lo <= hi");
    }
  }
}

}  // namespace

Interval operator+(const Interval& x, const Interval& y) {
  return ordered(x.lo + y.lo, x.hi + y.hi);
}

Interval operator*(const Interval& x, const Interval& y) {
  if (x.lo < 0.0 || y.lo < 0.0) {
    throw std::domain_error("interval product requires nonnegative bounds");
  }
  return ordered(x.lo * y.lo, x.hi * y.hi);
}

Interval clamp_probability(Interval x) {
  x.lo = std::max(x.lo, 0.0);
  x.hi = std::min(x.hi, 1.0);
  return ordered(x.lo, x.hi);
}

Interval total(std::span<const Interval> v) {
  Interval sum{0.0, 0.0};
  for (const auto& x : v) {
    sum.lo += x.lo;
    sum.hi += x.hi;
  }
  return sum;
}

double max_width(std::span<const Interval> v) {
  double w = 0.0;
  for (const auto& x : v) w = std::max(w, x.width());
  return w;
}

bool is_coherent(std::span<const Interval> v) {
  if (v.empty()) return false;
  const Interval sum = total(v);
  return sum.lo <= 1.0 + kCoherenceTolerance &&
         sum.hi >= 1.0 - kCoherenceTolerance;
}

bool is_point(std::span<const Interval> v) {
  return std::all_of(v.begin(), v.end(),
                     [](const Interval& x) { return x.is_point(); });
}

IntervalVector vacuous(std::size_t n) {
  if (n == 0) throw std::invalid_argument("vacuous: state count must be >= 1");
  return IntervalVector(n, Interval{0.0, 1.0});
}

IntervalVector point_vector(std::span<const double> values) {
  return IntervalVector(values.begin(), values.end());
}

IntervalVector indicator(std::size_t n, std::size_t state) {
  if (state >= n) throw std::out_of_range("indicator: state out of range");
  IntervalVector v(n, Interval{0.0});
  v[state] = Interval{1.0};
  return v;
}

bool bit_equal(std::span<const Interval> a, std::span<const Interval> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::signbit(a[i].lo) != std::signbit(b[i].lo) ||
        std::signbit(a[i].hi) != std::signbit(b[i].hi) || a[i].lo != b[i].lo ||
        a[i].hi != b[i].hi) {
      return false;
    }
  }
  return true;
}

Interval ar_dot(std::span<const Interval> a, std::span<const Interval> b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("ar_dot: vectors must be nonempty and equal length");
  }
  require_nonnegative(a, "ar_dot");
  require_nonnegative(b, "ar_dot");
  if (!is_coherent(b)) {
    throw std::invalid_argument("ar_dot: second argument is not coherent");
  }

  const std::size_t n = a.size();
  std::vector<double> keys(n);
  std::vector<double> mass(n);

  // Start every b at its lower bound, then pour the remaining mass into the
  // entries with the smallest (for the lower bound) or largest (for the upper
  // bound) coefficients first.
  auto extremum = [&](bool upper) {
    double slack = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      mass[i] = b[i].lo;
      slack -= b[i].lo;
      keys[i] = upper ? a[i].hi : a[i].lo;
    }
    if (slack > 0.0) {
      IncrementalSortCursor cursor(
          keys, upper ? IncrementalSortCursor::Order::kDescending
                      : IncrementalSortCursor::Order::kAscending);
      while (slack > 0.0) {
        const auto i = cursor.next();
        if (!i) break;
        const double step = std::min(b[*i].hi - b[*i].lo, slack);
        mass[*i] += step;
        slack -= step;
      }
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += keys[i] * mass[i];
    return sum;
  };

  const double lower = extremum(false);
  const double upper = extremum(true);
  return ordered(lower, upper);
}

std::optional<IntervalVector> try_normalize(std::span<const Interval> v) {
  if (v.empty()) throw std::invalid_argument("normalize: empty vector");
  require_nonnegative(v, "normalize");
  const std::size_t n = v.size();
  if (std::all_of(v.begin(), v.end(),
                  [](const Interval& x) { return x.hi == 0.0; })) {
    return std::nullopt;
  }

  // Σ_{j≠i} via prefix and suffix sums so the two bounds of a point entry go
  // through identical arithmetic.
  std::vector<double> prefix_lo(n + 1, 0.0), prefix_hi(n + 1, 0.0);
  std::vector<double> suffix_lo(n + 1, 0.0), suffix_hi(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    prefix_lo[i + 1] = prefix_lo[i] + v[i].lo;
    prefix_hi[i + 1] = prefix_hi[i] + v[i].hi;
  }
  for (std::size_t i = n; i-- > 0;) {
    suffix_lo[i] = suffix_lo[i + 1] + v[i].lo;
    suffix_hi[i] = suffix_hi[i + 1] + v[i].hi;
  }

  IntervalVector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double others_hi = prefix_hi[i] + suffix_hi[i + 1];
    const double others_lo = prefix_lo[i] + suffix_lo[i + 1];
    const double lo_den = v[i].lo + others_hi;
    const double hi_den = v[i].hi + others_lo;
    // A zero denominator means entry i is the only one that can carry mass
    // (lower bound) or that it carries none (upper bound).
    const double lo = lo_den > 0.0 ? v[i].lo / lo_den : 1.0;
    const double hi = hi_den > 0.0 ? v[i].hi / hi_den : 0.0;
    out[i] = clamp_probability({lo, hi});
  }
  return out;
}

IntervalVector normalize(std::span<const Interval> v) {
  auto out = try_normalize(v);
  if (!out) {
    throw ConflictingEvidence("cannot normalize an all-zero vector");
  }
  return std::move(*out);
}

IncrementalSortCursor::IncrementalSortCursor(std::span<const double> keys,
                                             Order order)
    : keys_(keys.begin(), keys.end()), index_(keys.size()), order_(order) {
  std::iota(index_.begin(), index_.end(), std::size_t{0});
  pivots_.push_back(index_.size());
}

bool IncrementalSortCursor::before(std::size_t a, std::size_t b) const {
  if (keys_[a] != keys_[b]) {
    return order_ == Order::kAscending ? keys_[a] < keys_[b]
                                       : keys_[a] > keys_[b];
  }
  return a < b;
}

std::size_t IncrementalSortCursor::partition(std::size_t begin,
                                             std::size_t end) {
  // Median of three as pivot, moved to the end, then Lomuto partition.
  const std::size_t mid = begin + (end - begin) / 2;
  std::size_t last = end - 1;
  std::size_t candidates[3] = {begin, mid, last};
  std::sort(std::begin(candidates), std::end(candidates),
            [&](std::size_t x, std::size_t y) {
              return before(index_[x], index_[y]);
            });
  std::swap(index_[candidates[1]], index_[last]);
  const std::size_t pivot = index_[last];
  std::size_t store = begin;
  for (std::size_t i = begin; i < last; ++i) {
    if (before(index_[i], pivot)) std::swap(index_[i], index_[store++]);
  }
  std::swap(index_[store], index_[last]);
  return store;
}

std::optional<std::size_t> IncrementalSortCursor::next() {
  if (position_ >= index_.size()) return std::nullopt;
  while (pivots_.back() != position_) {
    pivots_.push_back(partition(position_, pivots_.back()));
  }
  pivots_.pop_back();
  return index_[position_++];
}

std::string to_string(const Interval& x) {
  std::ostringstream os;
  os.precision(6);
  os << '[' << x.lo << ", " << x.hi << ']';
  return os.str();
}

std::string to_string(std::span<const Interval> v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += to_string(v[i]);
  }
  return out + ")";
}

}  // namespace lpe
