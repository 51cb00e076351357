#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <vector>

namespace semidist {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// One interval of the real line; each end may be open or closed. Infinite
/// ends are always open.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = false;
  bool hi_closed = false;

  static Interval open(double lo, double hi) { return {lo, hi, false, false}; }
  static Interval closed(double lo, double hi) { return {lo, hi, true, true}; }
  static Interval left_open(double lo, double hi) { return {lo, hi, false, true}; }
  static Interval right_open(double lo, double hi) { return {lo, hi, true, false}; }
  /// [lo, inf)
  static Interval at_least(double lo) { return {lo, kInfinity, true, false}; }
  /// (-inf, hi]
  static Interval at_most(double hi) { return {-kInfinity, hi, false, true}; }
  static Interval real_line() { return {-kInfinity, kInfinity, false, false}; }

  bool empty() const { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }

  bool contains(double x) const {
    const bool above = lo_closed ? x >= lo : x > lo;
    const bool below = hi_closed ? x <= hi : x < hi;
    return above && below;
  }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Intersection of two intervals (possibly empty).
inline Interval intersect(const Interval& a, const Interval& b) {
  Interval r;
  if (a.lo > b.lo) {
    r.lo = a.lo;
    r.lo_closed = a.lo_closed;
  } else if (b.lo > a.lo) {
    r.lo = b.lo;
    r.lo_closed = b.lo_closed;
  } else {
    r.lo = a.lo;
    r.lo_closed = a.lo_closed && b.lo_closed;
  }
  if (a.hi < b.hi) {
    r.hi = a.hi;
    r.hi_closed = a.hi_closed;
  } else if (b.hi < a.hi) {
    r.hi = b.hi;
    r.hi_closed = b.hi_closed;
  } else {
    r.hi = a.hi;
    r.hi_closed = a.hi_closed && b.hi_closed;
  }
  return r;
}

/// A finite union of disjoint intervals kept sorted and merged.
class IntervalUnion {
 public:
  IntervalUnion() = default;
  IntervalUnion(std::initializer_list<Interval> parts) : parts_(parts) { normalize(); }
  explicit IntervalUnion(std::vector<Interval> parts) : parts_(std::move(parts)) { normalize(); }

  static IntervalUnion real_line() { return IntervalUnion{Interval::real_line()}; }

  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }

  bool contains(double x) const {
    return std::any_of(parts_.begin(), parts_.end(), [x](const Interval& i) { return i.contains(x); });
  }

  IntervalUnion intersect(const IntervalUnion& other) const {
    std::vector<Interval> out;
    for (const Interval& a : parts_) {
      for (const Interval& b : other.parts_) {
        Interval c = semidist::intersect(a, b);
        if (!c.empty()) out.push_back(c);
      }
    }
    return IntervalUnion(std::move(out));
  }

  IntervalUnion unite(const IntervalUnion& other) const {
    std::vector<Interval> out = parts_;
    out.insert(out.end(), other.parts_.begin(), other.parts_.end());
    return IntervalUnion(std::move(out));
  }

  /// Complement within the real line.
  IntervalUnion complement() const {
    std::vector<Interval> out;
    double lo = -kInfinity;
    bool lo_closed = false;
    for (const Interval& i : parts_) {
      out.push_back({lo, i.lo, lo_closed, !i.lo_closed && std::isfinite(i.lo)});
      lo = i.hi;
      lo_closed = !i.hi_closed && std::isfinite(i.hi);
    }
    out.push_back({lo, kInfinity, lo_closed, false});
    return IntervalUnion(std::move(out));
  }

  friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

 private:
  void normalize() {
    std::erase_if(parts_, [](const Interval& i) { return i.empty(); });
    for (Interval& i : parts_) {
      if (std::isinf(i.lo)) i.lo_closed = false;
      if (std::isinf(i.hi)) i.hi_closed = false;
    }
    std::sort(parts_.begin(), parts_.end(), [](const Interval& a, const Interval& b) {
      if (a.lo != b.lo) return a.lo < b.lo;
      return a.lo_closed && !b.lo_closed;
    });
    std::vector<Interval> merged;
    for (const Interval& i : parts_) {
      if (!merged.empty()) {
        Interval& last = merged.back();
        const bool touches = i.lo < last.hi || (i.lo == last.hi && (i.lo_closed || last.hi_closed));
        if (touches) {
          if (i.hi > last.hi) {
            last.hi = i.hi;
            last.hi_closed = i.hi_closed;
          } else if (i.hi == last.hi) {
            last.hi_closed = last.hi_closed || i.hi_closed;
          }
          continue;
        }
      }
      merged.push_back(i);
    }
    parts_ = std::move(merged);
  }

  std::vector<Interval> parts_;
};

}  // namespace semidist
