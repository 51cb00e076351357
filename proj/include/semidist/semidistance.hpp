#pragma once

// The six semi-distances on the parameter space Theta used by the test
// catalog, and null/sure hypotheses.
//
// Every kind has the form d(a, b) = |f(h(a)) - f(h(b))| with f the identity,
// log, or division by a data-dependent scale, and h either the identity or
// the clamp max(., theta0) for the half-line kinds.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "semidist/errors.hpp"
#include "semidist/interval_set.hpp"
#include "semidist/measurement.hpp"

namespace semidist {

enum class SemiDistanceKind {
  Absolute,
  HalfLineAbsolute,
  LogRatio,
  HalfLineLogRatio,
  Studentized,
  HalfLineStudentized,
};

class SemiDistance {
 public:
  static SemiDistance absolute() { return {SemiDistanceKind::Absolute, 0.0, 1.0}; }
  static SemiDistance half_line_absolute(double theta0) {
    check_finite(theta0);
    return {SemiDistanceKind::HalfLineAbsolute, theta0, 1.0};
  }
  static SemiDistance log_ratio() { return {SemiDistanceKind::LogRatio, 0.0, 1.0}; }
  static SemiDistance half_line_log_ratio(double theta0) {
    if (!(theta0 > 0.0) || !std::isfinite(theta0)) {
      throw invalid_argument("half_line_log_ratio: theta0 must be positive and finite");
    }
    return {SemiDistanceKind::HalfLineLogRatio, theta0, 1.0};
  }
  /// |a - b| / (sigma_bar_prime(x) / sqrt(n)).
  static SemiDistance studentized(std::span<const double> x) {
    return {SemiDistanceKind::Studentized, 0.0, studentized_scale(x)};
  }
  static SemiDistance half_line_studentized(double theta0, std::span<const double> x) {
    check_finite(theta0);
    return {SemiDistanceKind::HalfLineStudentized, theta0, studentized_scale(x)};
  }
  /// Studentized kinds with the scale sigma_bar_prime / sqrt(n) given directly.
  static SemiDistance studentized_with_scale(double scale) {
    check_scale(scale);
    return {SemiDistanceKind::Studentized, 0.0, scale};
  }
  static SemiDistance half_line_studentized_with_scale(double theta0, double scale) {
    check_finite(theta0);
    check_scale(scale);
    return {SemiDistanceKind::HalfLineStudentized, theta0, scale};
  }

  SemiDistanceKind kind() const { return kind_; }
  /// Reference point of the half-line kinds (0 otherwise).
  double theta0() const { return theta0_; }
  /// Data scale of the studentized kinds (1 otherwise).
  double scale() const { return scale_; }

  bool half_line() const {
    return kind_ == SemiDistanceKind::HalfLineAbsolute || kind_ == SemiDistanceKind::HalfLineLogRatio ||
           kind_ == SemiDistanceKind::HalfLineStudentized;
  }
  /// Theta = (0, inf) for the log kinds, the real line otherwise.
  bool positive_domain() const {
    return kind_ == SemiDistanceKind::LogRatio || kind_ == SemiDistanceKind::HalfLineLogRatio;
  }

  double operator()(double a, double b) const {
    check_point(a);
    check_point(b);
    return std::abs(transform(clamp(a)) - transform(clamp(b)));
  }

  /// The coordinate f in which the semi-distance is a plain absolute difference.
  double transform(double theta) const {
    return positive_domain() ? std::log(theta) : theta / scale_;
  }
  double inverse_transform(double u) const {
    return positive_domain() ? std::exp(u) : u * scale_;
  }

  /// {theta in Theta : d(theta, center) >= eta}.
  IntervalUnion ball_complement(double center, double eta) const {
    check_point(center);
    if (!(eta >= 0.0)) throw invalid_argument("ball_complement: eta must be >= 0");
    const double c = transform(clamp(center));
    const double low_end = positive_domain() ? 0.0 : -kInfinity;
    IntervalUnion upper{Interval::at_least(inverse_transform(c + eta))};
    const double below = c - eta;
    if (half_line() && below < transform(theta0_)) return upper;
    const double edge = inverse_transform(below);
    if (positive_domain() && !(edge > 0.0)) return upper;
    return upper.unite(IntervalUnion{Interval{low_end, edge, false, true}});
  }

  friend bool operator==(const SemiDistance&, const SemiDistance&) = default;

 private:
  SemiDistance(SemiDistanceKind kind, double theta0, double scale)
      : kind_(kind), theta0_(theta0), scale_(scale) {}

  static void check_finite(double theta0) {
    if (!std::isfinite(theta0)) throw invalid_argument("semi-distance: theta0 must be finite");
  }
  static void check_scale(double scale) {
    if (!std::isfinite(scale)) throw invalid_argument("semi-distance: scale must be finite");
    if (!(scale > 0.0)) {
      throw degenerate_sample("studentized semi-distance: sigma_bar_prime(x) is zero (all values equal)");
    }
  }
  static double studentized_scale(std::span<const double> x) {
    const double scale = sigma_bar_prime(x) / std::sqrt(static_cast<double>(x.size()));
    check_scale(scale);
    return scale;
  }

  void check_point(double theta) const {
    if (std::isnan(theta)) throw domain_error("semi-distance: NaN argument");
    if (positive_domain() && !(theta > 0.0 && std::isfinite(theta))) {
      throw domain_error("semi-distance: log kinds need a positive finite argument");
    }
  }
  double clamp(double theta) const { return half_line() ? std::max(theta, theta0_) : theta; }

  SemiDistanceKind kind_;
  double theta0_;
  double scale_;
};

enum class HypothesisKind { Point, LowerHalfLine };

/// H = {value} or H = the part of Theta at or below value.
struct Hypothesis {
  HypothesisKind kind;
  double value;

  static Hypothesis point(double v) { return {HypothesisKind::Point, v}; }
  static Hypothesis lower_half_line(double v) { return {HypothesisKind::LowerHalfLine, v}; }

  bool contains(double theta) const {
    return kind == HypothesisKind::Point ? theta == value : theta <= value;
  }

  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

}  // namespace semidist
