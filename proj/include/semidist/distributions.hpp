#pragma once

// Densities, distribution functions and quantiles for the four sampling laws
// the test catalog needs: standard normal, chi-squared, Student t and F.
//
// cdf() and sf() are both provided; each evaluates its own tail directly, so
// upper-tail masses such as alpha = 0.005 keep full relative precision.
// Quantiles invert cdf (p <= 1/2) or sf (p > 1/2) by safeguarded Newton.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "semidist/errors.hpp"
#include "semidist/root_finding.hpp"
#include "semidist/special_functions.hpp"

namespace semidist {

enum class Family { Normal, ChiSquared, StudentT, FisherF };

class DistributionSpec {
 public:
  static DistributionSpec normal() { return DistributionSpec(Family::Normal, 0, std::nullopt); }

  static DistributionSpec chi_squared(int dof) {
    check_dof(dof, "chi_squared");
    return DistributionSpec(Family::ChiSquared, dof, std::nullopt);
  }

  static DistributionSpec student_t(int dof) {
    check_dof(dof, "student_t");
    return DistributionSpec(Family::StudentT, dof, std::nullopt);
  }

  static DistributionSpec fisher_f(int dof1, int dof2) {
    check_dof(dof1, "fisher_f");
    check_dof(dof2, "fisher_f");
    return DistributionSpec(Family::FisherF, dof1, dof2);
  }

  Family family() const { return family_; }
  /// Degrees of freedom; 0 for the normal family.
  int dof1() const { return dof1_; }
  /// Second degrees of freedom, present only for the F family.
  std::optional<int> dof2() const { return dof2_; }

  /// Support is (0, inf) for chi-squared and F, the real line otherwise.
  bool positive_support() const { return family_ == Family::ChiSquared || family_ == Family::FisherF; }

  std::string name() const {
    switch (family_) {
      case Family::Normal: return "Normal";
      case Family::ChiSquared: return "ChiSquared(" + std::to_string(dof1_) + ")";
      case Family::StudentT: return "StudentT(" + std::to_string(dof1_) + ")";
      case Family::FisherF:
        return "FisherF(" + std::to_string(dof1_) + "," + std::to_string(*dof2_) + ")";
    }
    return "?";
  }

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;

 private:
  DistributionSpec(Family family, int dof1, std::optional<int> dof2)
      : family_(family), dof1_(dof1), dof2_(dof2) {}

  static void check_dof(int dof, const char* who) {
    if (dof < 1) throw invalid_argument(std::string(who) + ": degrees of freedom must be >= 1");
  }

  Family family_;
  int dof1_;
  std::optional<int> dof2_;
};

namespace detail {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Density without the support check; 0 outside the support.
inline double density(const DistributionSpec& d, double x) {
  switch (d.family()) {
    case Family::Normal:
      return kInvSqrt2Pi * std::exp(-0.5 * x * x);
    case Family::ChiSquared: {
      if (x <= 0.0) return 0.0;
      const double h = 0.5 * d.dof1();
      return std::exp((h - 1.0) * std::log(x) - 0.5 * x - h * std::numbers::ln2 -
                      special::log_gamma(h));
    }
    case Family::StudentT: {
      const double k = d.dof1();
      const double log_c = special::log_gamma(0.5 * (k + 1.0)) - special::log_gamma(0.5 * k) -
                           0.5 * std::log(k * std::numbers::pi);
      return std::exp(log_c - 0.5 * (k + 1.0) * std::log1p(x * x / k));
    }
    case Family::FisherF: {
      if (x <= 0.0) return 0.0;
      const double a = d.dof1();
      const double b = *d.dof2();
      const double log_c = special::log_gamma(0.5 * (a + b)) - special::log_gamma(0.5 * a) -
                           special::log_gamma(0.5 * b) + 0.5 * a * std::log(a / b);
      return std::exp(log_c + (0.5 * a - 1.0) * std::log(x) -
                      0.5 * (a + b) * std::log1p(a * x / b));
    }
  }
  return 0.0;
}

// Both tails at x.
inline special::Tails tails(const DistributionSpec& d, double x) {
  switch (d.family()) {
    case Family::Normal:
      return {0.5 * std::erfc(-x * kInvSqrt2), 0.5 * std::erfc(x * kInvSqrt2)};
    case Family::ChiSquared:
      return special::regularized_gamma(0.5 * d.dof1(), 0.5 * x);
    case Family::StudentT: {
      if (std::isinf(x)) return x > 0 ? special::Tails{1.0, 0.0} : special::Tails{0.0, 1.0};
      const double k = d.dof1();
      const double t2 = x * x;
      // Mass beyond |x| on one side is I_{k/(k+x^2)}(k/2, 1/2) / 2.
      const special::Tails beta = special::regularized_beta(0.5 * k, 0.5, k / (k + t2), t2 / (k + t2));
      const double outer = 0.5 * beta.lower;
      const double inner = 0.5 + 0.5 * beta.upper;
      return x >= 0.0 ? special::Tails{inner, outer} : special::Tails{outer, inner};
    }
    case Family::FisherF: {
      if (x <= 0.0) return {0.0, 1.0};
      if (std::isinf(x)) return {1.0, 0.0};
      const double a = d.dof1();
      const double b = *d.dof2();
      const double denom = a * x + b;
      return special::regularized_beta(0.5 * a, 0.5 * b, a * x / denom, b / denom);
    }
  }
  return {0.0, 1.0};
}

inline void check_probability(double p, const char* who) {
  if (!(p > 0.0 && p < 1.0)) {
    throw invalid_argument(std::string(who) + ": probability must lie in (0, 1)");
  }
  if (p < 1e-300) {
    throw tail_underflow(std::string(who) + ": probability below 1e-300 is not representable");
  }
}

// Solves tail(x) = target where tail is cdf (lower) or sf (upper).
inline double invert_tail(const DistributionSpec& d, double target, bool lower) {
  const bool positive = d.positive_support();
  auto tail_at = [&](double x) {
    const special::Tails t = tails(d, x);
    return lower ? t.lower : t.upper;
  };
  // g is increasing in x in both cases.
  auto g = [&](double x) -> roots::ValueSlope {
    const double value = lower ? tail_at(x) - target : target - tail_at(x);
    return {value, density(d, x)};
  };

  if (!positive) {
    // Symmetric laws are only inverted for upper tails <= 1/2, so x >= 0.
    if (lower || target > 0.5) throw invalid_argument("quantile: internal tail selection error");
    double hi = 1.0;
    while (g(hi).value < 0.0) {
      hi *= 4.0;
      if (!std::isfinite(hi)) throw tail_underflow("quantile: upper tail not bracketable");
    }
    return roots::newton_increasing(g, 0.0, hi, 0.5 * hi, false);
  }

  // Positive support: expand geometrically from a central guess.
  const double guess = d.family() == Family::ChiSquared ? static_cast<double>(d.dof1()) : 1.0;
  double lo = guess;
  double hi = guess;
  if (g(guess).value < 0.0) {
    while (g(hi).value < 0.0) {
      lo = hi;
      hi *= 4.0;
      if (!std::isfinite(hi)) throw tail_underflow("quantile: upper tail not bracketable");
    }
  } else {
    while (g(lo).value >= 0.0) {
      hi = lo;
      lo *= 0.25;
      if (lo < std::numeric_limits<double>::min()) {
        throw tail_underflow("quantile: lower tail underflows the representable range");
      }
    }
  }
  return roots::newton_increasing(g, lo, hi, std::sqrt(lo * hi), true);
}

}  // namespace detail

/// Density at `x`. Throws domain_error outside the (open) support.
inline double pdf(const DistributionSpec& d, double x) {
  if (!std::isfinite(x)) throw domain_error("pdf: x must be finite");
  if (d.positive_support() && !(x > 0.0)) {
    throw domain_error("pdf: " + d.name() + " requires x > 0");
  }
  return detail::density(d, x);
}

/// P(X <= x).
inline double cdf(const DistributionSpec& d, double x) {
  if (std::isnan(x)) throw invalid_argument("cdf: x is NaN");
  return detail::tails(d, x).lower;
}

/// P(X > x), computed directly rather than as 1 - cdf.
inline double sf(const DistributionSpec& d, double x) {
  if (std::isnan(x)) throw invalid_argument("sf: x is NaN");
  return detail::tails(d, x).upper;
}

/// x with cdf(x) = p.
inline double quantile(const DistributionSpec& d, double p) {
  detail::check_probability(p, "quantile");
  const bool symmetric = !d.positive_support();
  if (symmetric && p == 0.5) return 0.0;
  if (p <= 0.5) {
    if (symmetric) return -detail::invert_tail(d, p, /*lower=*/false);
    return detail::invert_tail(d, p, /*lower=*/true);
  }
  return detail::invert_tail(d, 1.0 - p, /*lower=*/false);
}

/// x with sf(x) = q; the upper-q point.
inline double upper_quantile(const DistributionSpec& d, double q) {
  detail::check_probability(q, "upper_quantile");
  const bool symmetric = !d.positive_support();
  if (symmetric && q == 0.5) return 0.0;
  if (q <= 0.5) return detail::invert_tail(d, q, /*lower=*/false);
  if (symmetric) return -detail::invert_tail(d, 1.0 - q, /*lower=*/false);
  return detail::invert_tail(d, 1.0 - q, /*lower=*/true);
}

enum class TailCount { One, Two };

/// Standard normal critical value: Two puts alpha/2 in each tail, One puts
/// alpha in the upper tail.
inline double z_alpha(double alpha, TailCount tails) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw invalid_argument("z_alpha: alpha must lie in (0, 1)");
  const double p = tails == TailCount::Two ? 1.0 - 0.5 * alpha : 1.0 - alpha;
  return quantile(DistributionSpec::normal(), p);
}

namespace detail {

// Scale applied to exp(+-2 eta) in the log-interval equations: the sample
// size n for chi-squared (the estimator is SS/n), 1 for the F ratio.
inline double log_interval_scale(const DistributionSpec& d, int n, const char* who) {
  if (n < 2) throw invalid_argument(std::string(who) + ": n must be >= 2");
  if (d.family() == Family::ChiSquared) {
    if (d.dof1() != n - 1) throw invalid_argument(std::string(who) + ": expected ChiSquared(n-1)");
    return static_cast<double>(n);
  }
  if (d.family() == Family::FisherF) {
    if (d.dof1() != n - 1) throw invalid_argument(std::string(who) + ": expected FisherF(n-1, m-1)");
    return 1.0;
  }
  throw invalid_argument(std::string(who) + ": requires a ChiSquared or FisherF law");
}

// Mass outside [scale e^{-2 eta}, scale e^{2 eta}].
inline double log_interval_outside(const DistributionSpec& d, double scale, double eta) {
  return tails(d, scale * std::exp(-2.0 * eta)).lower + tails(d, scale * std::exp(2.0 * eta)).upper;
}

}  // namespace detail

/// eta > 0 with 1 - alpha = mass of [s e^{-2 eta}, s e^{2 eta}], where s = n
/// for ChiSquared(n - 1) and s = 1 for FisherF(n - 1, m - 1).
inline double symmetric_log_interval_eta(const DistributionSpec& d, int n, double alpha) {
  const double scale = detail::log_interval_scale(d, n, "symmetric_log_interval_eta");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw invalid_argument("symmetric_log_interval_eta: alpha must lie in (0, 1)");
  }
  // The outside mass falls strictly from 1 at eta = 0 to 0, so the root is
  // unique; double the bracket until it straddles alpha.
  double hi = 1.0;
  while (detail::log_interval_outside(d, scale, hi) > alpha) {
    hi *= 2.0;
    if (hi > 1e6) throw calibration_error("symmetric_log_interval_eta: bracket search failed");
  }
  auto f = [&](double eta) { return alpha - detail::log_interval_outside(d, scale, eta); };
  return roots::bisect_increasing(f, 0.0, hi, 1e-16);
}

/// eta' > 0 with alpha = sf(s e^{2 eta'}), s as above. Throws
/// calibration_error when alpha >= sf(s), where no positive root exists.
inline double upper_tail_log_eta(const DistributionSpec& d, int n, double alpha) {
  const double scale = detail::log_interval_scale(d, n, "upper_tail_log_eta");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw invalid_argument("upper_tail_log_eta: alpha must lie in (0, 1)");
  }
  if (alpha >= sf(d, scale)) {
    throw calibration_error("upper_tail_log_eta: no positive root for this alpha");
  }
  return 0.5 * std::log(upper_quantile(d, alpha) / scale);
}

}  // namespace semidist
