#pragma once

#include "rankdist/rational.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

namespace rankdist {

/// Closed interval [lo, hi] over an exactly representable scalar.
///
/// With Rational endpoints every operation below is exact, so the result of
/// any expression encloses the true value whenever each operand encloses its
/// own. Nothing is rounded; widths only come from enclosures fed in from
/// truncated infinite quantities.
template <typename Scalar>
class Interval {
 public:
  Interval() : lo_(0), hi_(0) {}
  Interval(const Scalar& point) : lo_(point), hi_(point) {}  // NOLINT
  Interval(const Scalar& lo, const Scalar& hi) : lo_(lo), hi_(hi) {
    if (hi_ < lo_) throw std::invalid_argument("interval: lo > hi");
  }

  const Scalar& lo() const { return lo_; }
  const Scalar& hi() const { return hi_; }
  Scalar width() const { return hi_ - lo_; }
  Scalar mid() const { return (lo_ + hi_) / 2; }
  bool is_point() const { return lo_ == hi_; }

  bool contains(const Scalar& x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& other) const {
    return lo_ <= other.lo_ && other.hi_ <= hi_;
  }
  bool intersects(const Interval& other) const {
    return !(other.hi_ < lo_ || hi_ < other.lo_);
  }
  bool contains_zero() const { return lo_ <= 0 && 0 <= hi_; }

  /// True when every point of the interval lies in [a, b].
  bool inside(const Scalar& a, const Scalar& b) const { return a <= lo_ && hi_ <= b; }

  Interval& operator+=(const Interval& o) {
    lo_ += o.lo_;
    hi_ += o.hi_;
    return *this;
  }
  Interval& operator-=(const Interval& o) {
    Scalar lo = lo_ - o.hi_;
    hi_ = hi_ - o.lo_;
    lo_ = std::move(lo);
    return *this;
  }
  Interval& operator*=(const Interval& o) {
    if (lo_ >= 0 && o.lo_ >= 0) {
      lo_ *= o.lo_;
      hi_ *= o.hi_;
      return *this;
    }
    Scalar a = lo_ * o.lo_, b = lo_ * o.hi_, c = hi_ * o.lo_, d = hi_ * o.hi_;
    lo_ = std::min({a, b, c, d});
    hi_ = std::max({a, b, c, d});
    return *this;
  }
  Interval& operator/=(const Interval& o) {
    if (o.contains_zero()) throw std::domain_error("interval: division by an interval containing 0");
    return *this *= Interval(1 / o.hi_, 1 / o.lo_);
  }

  friend Interval operator+(Interval a, const Interval& b) { return a += b; }
  friend Interval operator-(Interval a, const Interval& b) { return a -= b; }
  friend Interval operator*(Interval a, const Interval& b) { return a *= b; }
  friend Interval operator/(Interval a, const Interval& b) { return a /= b; }
  friend Interval operator-(const Interval& a) { return Interval(-a.hi_, -a.lo_); }

  friend bool operator==(const Interval& a, const Interval& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Interval& x) {
    return os << '[' << x.lo_ << ", " << x.hi_ << ']';
  }

 private:
  Scalar lo_;
  Scalar hi_;
};

template <typename Scalar>
Interval<Scalar> abs(const Interval<Scalar>& x) {
  if (x.lo() >= 0) return x;
  if (x.hi() <= 0) return -x;
  return Interval<Scalar>(Scalar(0), std::max(-x.lo(), x.hi()));
}

template <typename Scalar>
Interval<Scalar> max(const Interval<Scalar>& a, const Interval<Scalar>& b) {
  return Interval<Scalar>(std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

/// Smallest interval containing both.
template <typename Scalar>
Interval<Scalar> hull(const Interval<Scalar>& a, const Interval<Scalar>& b) {
  return Interval<Scalar>(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

/// Common part of two enclosures of the same quantity; throws if disjoint.
template <typename Scalar>
Interval<Scalar> intersect(const Interval<Scalar>& a, const Interval<Scalar>& b) {
  if (!a.intersects(b)) throw std::logic_error("interval: disjoint enclosures of one quantity");
  return Interval<Scalar>(std::max(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}

template <typename Range>
auto sum(const Range& xs) {
  using Value = std::decay_t<decltype(*std::begin(xs))>;
  Value total;
  for (const auto& x : xs) total += x;
  return total;
}

using IntervalRat = Interval<Rational>;

/// Interval as {"lo": "num/den", "hi": "num/den"} style strings.
std::string to_string(const IntervalRat& x);

/// Outward rounding of both endpoints onto the grid 2^-bits. Keeps the
/// enclosure while capping the size of endpoint numerators.
IntervalRat round_outward(const IntervalRat& x, unsigned bits);

}  // namespace rankdist
