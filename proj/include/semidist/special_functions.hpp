#pragma once

// Log-gamma and the regularized incomplete gamma and beta functions.
//
// Each incomplete function returns the lower and upper regularized values
// together. Whichever of the two is the small tail is computed directly, so
// both stay accurate to a few ulps relative to themselves. Everything here is
// reentrant.

#include <cmath>
#include <limits>
#include <numbers>

#include "semidist/errors.hpp"

namespace semidist::special {

inline constexpr double kEpsilon = std::numeric_limits<double>::epsilon();

/// ln Gamma(x) for x > 0 (Lanczos, g = 7, nine terms; |error| ~ 1e-15).
inline double log_gamma(double x) {
  static constexpr double kCoeff[9] = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw domain_error("log_gamma: argument must be positive and finite");
  }
  if (x < 0.5) {
    // Reflection keeps the series in its accurate range.
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double a = kCoeff[0];
  for (int i = 1; i < 9; ++i) a += kCoeff[i] / (z + i);
  const double t = z + 7.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

/// Lower and upper regularized tails, p + q = 1.
struct Tails {
  double lower;
  double upper;
};

namespace detail {

inline constexpr int kMaxIterations = 100000;
inline constexpr double kTiny = 1e-300;

// Series for P(a, x), valid for x < a + 1.
inline double gamma_p_series(double a, double x, double log_prefix) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < kMaxIterations; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEpsilon) return sum * std::exp(log_prefix);
  }
  throw calibration_error("incomplete gamma series did not converge");
}

// Continued fraction for Q(a, x), valid for x >= a + 1 (modified Lentz).
inline double gamma_q_fraction(double a, double x, double log_prefix) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEpsilon) return std::exp(log_prefix) * h;
  }
  throw calibration_error("incomplete gamma continued fraction did not converge");
}

// Continued fraction for I_x(a, b) (modified Lentz), converges for x < (a+1)/(a+b+2).
inline double beta_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEpsilon) return h;
  }
  throw calibration_error("incomplete beta continued fraction did not converge");
}

}  // namespace detail

/// Regularized incomplete gamma: lower = P(a, x), upper = Q(a, x).
inline Tails regularized_gamma(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw domain_error("regularized_gamma: a must be positive");
  if (std::isnan(x)) throw domain_error("regularized_gamma: x is NaN");
  if (x <= 0.0) return {0.0, 1.0};
  if (std::isinf(x)) return {1.0, 0.0};
  const double log_prefix = a * std::log(x) - x - log_gamma(a);
  if (x < a + 1.0) {
    const double p = detail::gamma_p_series(a, x, log_prefix);
    return {p, 1.0 - p};
  }
  const double q = detail::gamma_q_fraction(a, x, log_prefix);
  return {1.0 - q, q};
}

/// Regularized incomplete beta I_x(a, b). `y` must equal 1 - x; passing it
/// separately keeps precision when x is close to 1.
inline Tails regularized_beta(double a, double b, double x, double y) {
  if (!(a > 0.0) || !(b > 0.0)) throw domain_error("regularized_beta: a and b must be positive");
  if (std::isnan(x) || std::isnan(y)) throw domain_error("regularized_beta: NaN argument");
  if (x <= 0.0) return {0.0, 1.0};
  if (y <= 0.0) return {1.0, 0.0};
  const double log_front =
      log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) + b * std::log(y);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double lower = std::exp(log_front) * detail::beta_fraction(a, b, x) / a;
    return {lower, 1.0 - lower};
  }
  const double upper = std::exp(log_front) * detail::beta_fraction(b, a, y) / b;
  return {1.0 - upper, upper};
}

}  // namespace semidist::special
