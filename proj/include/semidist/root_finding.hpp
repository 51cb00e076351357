#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <utility>

#include "semidist/errors.hpp"

namespace semidist::roots {

/// Value and derivative of the function being solved.
struct ValueSlope {
  double value;
  double slope;
};

/// Bisection for an increasing `f` with f(lo) <= 0 <= f(hi). Stops when the
/// bracket is within `rel_tol` of its upper end, narrower than `abs_tol`, or
/// stops shrinking.
template <std::invocable<double> F>
double bisect_increasing(F&& f, double lo, double hi, double rel_tol = 1e-15,
                         double abs_tol = 0.0, int max_iterations = 2000) {
  for (int i = 0; i < max_iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= rel_tol * std::abs(hi) || hi - lo <= abs_tol) break;
  }
  return 0.5 * (lo + hi);
}

/// Safeguarded Newton iteration for an increasing function with a sign change
/// on [lo, hi]. A Newton step that would leave the bracket, or that is not at
/// least twice as fast as the step before, is replaced by bisection. With
/// `geometric` set (positive brackets spanning many decades) the bisection
/// point is the geometric mean.
template <std::invocable<double> FDF>
double newton_increasing(FDF&& fdf, double lo, double hi, double x0, bool geometric,
                         int max_iterations = 400) {
  if (!(lo < hi)) throw calibration_error("newton_increasing: empty bracket");
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  auto midpoint = [&] { return (geometric && lo > 0.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi); };
  double x = (x0 > lo && x0 < hi) ? x0 : midpoint();
  double step_old = hi - lo;
  double step = step_old;
  ValueSlope vs = fdf(x);
  for (int i = 0; i < max_iterations; ++i) {
    if (vs.value == 0.0) return x;
    if (vs.value < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 4.0 * kEps * std::abs(x)) return x;

    const double newton = x - vs.value / vs.slope;
    const bool in_bracket = std::isfinite(newton) && newton > lo && newton < hi;
    if (!in_bracket || std::abs(2.0 * vs.value) > std::abs(step_old * vs.slope)) {
      step_old = step;
      const double next = midpoint();
      step = next - x;
      x = next;
    } else {
      step_old = step;
      step = newton - x;
      x = newton;
      if (std::abs(step) <= 2.0 * kEps * std::abs(x)) return x;
    }
    vs = fdf(x);
  }
  return x;
}

}  // namespace semidist::roots
