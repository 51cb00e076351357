#pragma once

// Confidence regions, rejection regions and the normal-model test catalog.
//
// A TestProblem fixes the estimator E, the quantity pi and the semi-distance.
// eta_gamma() gives the radius with P(d(E(x), pi(w)) < eta) >= gamma; the
// confidence region collects the quantity values within that radius of E(x)
// and the rejection region collects the estimates at least eta^alpha =
// eta^{1 - alpha} away from every null value.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "semidist/distributions.hpp"
#include "semidist/errors.hpp"
#include "semidist/interval_set.hpp"
#include "semidist/measurement.hpp"
#include "semidist/semidistance.hpp"

namespace semidist {

enum class CatalogTest {
  MeanZ,
  MeanZUpper,
  Variance,
  VarianceUpper,
  MeanDifference,
  MeanDifferenceUpper,
  VarianceRatio,
  VarianceRatioUpper,
  MeanT,
  MeanTUpper,
};

enum class Estimator { MuBar, SigmaBar, DiffMuBar, SigmaPrimeRatio, MuBarStudentized };
enum class Quantity { Mu, Sigma, MuDiff, SigmaRatio };

/// A state of the one- or two-sample model.
using ModelState = std::variant<State, TwoSampleState>;

/// Standard deviations assumed known by the z-type tests.
struct KnownNuisance {
  std::optional<double> sigma;
  std::optional<double> sigma1;
  std::optional<double> sigma2;
};

struct CatalogEntry {
  CatalogTest test;
  std::string_view name;
  Estimator estimator;
  Quantity quantity;
  SemiDistanceKind distance;
};

inline constexpr std::array<CatalogEntry, 10> kCatalog{{
    {CatalogTest::MeanZ, "mean-z", Estimator::MuBar, Quantity::Mu, SemiDistanceKind::Absolute},
    {CatalogTest::MeanZUpper, "mean-z-upper", Estimator::MuBar, Quantity::Mu,
     SemiDistanceKind::HalfLineAbsolute},
    {CatalogTest::Variance, "var", Estimator::SigmaBar, Quantity::Sigma, SemiDistanceKind::LogRatio},
    {CatalogTest::VarianceUpper, "var-upper", Estimator::SigmaBar, Quantity::Sigma,
     SemiDistanceKind::HalfLineLogRatio},
    {CatalogTest::MeanDifference, "diff-means", Estimator::DiffMuBar, Quantity::MuDiff,
     SemiDistanceKind::Absolute},
    {CatalogTest::MeanDifferenceUpper, "diff-means-upper", Estimator::DiffMuBar, Quantity::MuDiff,
     SemiDistanceKind::HalfLineAbsolute},
    {CatalogTest::VarianceRatio, "var-ratio", Estimator::SigmaPrimeRatio, Quantity::SigmaRatio,
     SemiDistanceKind::LogRatio},
    {CatalogTest::VarianceRatioUpper, "var-ratio-upper", Estimator::SigmaPrimeRatio,
     Quantity::SigmaRatio, SemiDistanceKind::HalfLineLogRatio},
    {CatalogTest::MeanT, "mean-t", Estimator::MuBarStudentized, Quantity::Mu,
     SemiDistanceKind::Studentized},
    {CatalogTest::MeanTUpper, "mean-t-upper", Estimator::MuBarStudentized, Quantity::Mu,
     SemiDistanceKind::HalfLineStudentized},
}};

inline const CatalogEntry& catalog_entry(CatalogTest test) {
  for (const CatalogEntry& e : kCatalog) {
    if (e.test == test) return e;
  }
  throw invalid_argument("unknown catalog test");
}

inline std::string_view test_name(CatalogTest test) { return catalog_entry(test).name; }

inline std::optional<CatalogTest> parse_test_name(std::string_view name) {
  for (const CatalogEntry& e : kCatalog) {
    if (e.name == name) return e.test;
  }
  return std::nullopt;
}

/// Estimator, quantity and semi-distance of one catalog test, with the sample
/// sizes, the half-line reference point theta0 and any known nuisance.
class TestProblem {
 public:
  /// `m` is ignored for one-sample tests. `theta0` is the reference point of
  /// the half-line kinds; two-sided kinds take their null from the hypothesis.
  static TestProblem make(CatalogTest test, int n, int m = 0, double theta0 = std::nan(""),
                          KnownNuisance known = {}) {
    return TestProblem(test, n, m, theta0, known);
  }

  CatalogTest test() const { return entry_->test; }
  std::string_view name() const { return entry_->name; }
  Estimator estimator() const { return entry_->estimator; }
  Quantity quantity() const { return entry_->quantity; }
  SemiDistanceKind distance_kind() const { return entry_->distance; }
  int n() const { return n_; }
  int m() const { return m_; }
  double theta0() const { return theta0_; }
  const KnownNuisance& known() const { return known_; }

  bool two_sample() const {
    return entry_->quantity == Quantity::MuDiff || entry_->quantity == Quantity::SigmaRatio;
  }
  bool half_line() const {
    return entry_->distance == SemiDistanceKind::HalfLineAbsolute ||
           entry_->distance == SemiDistanceKind::HalfLineLogRatio ||
           entry_->distance == SemiDistanceKind::HalfLineStudentized;
  }
  bool studentized() const { return entry_->estimator == Estimator::MuBarStudentized; }
  /// Theta = (0, inf) for the scale quantities, the real line otherwise.
  bool positive_domain() const {
    return entry_->quantity == Quantity::Sigma || entry_->quantity == Quantity::SigmaRatio;
  }

  /// Same problem with a different half-line reference point.
  TestProblem with_theta0(double theta0) const { return TestProblem(test(), n_, m_, theta0, known_); }

 private:
  TestProblem(CatalogTest test, int n, int m, double theta0, KnownNuisance known)
      : entry_(&catalog_entry(test)), n_(n), m_(two_sample_test(test) ? m : 0), theta0_(theta0),
        known_(known) {
    const int min_n = entry_->estimator == Estimator::MuBar || entry_->estimator == Estimator::DiffMuBar ? 1 : 2;
    if (n_ < min_n) {
      throw invalid_argument(std::string(name()) + ": n must be >= " + std::to_string(min_n));
    }
    if (two_sample() && m_ < min_n) {
      throw invalid_argument(std::string(name()) + ": m must be >= " + std::to_string(min_n));
    }
    if (half_line()) {
      if (!std::isfinite(theta0_)) {
        throw invalid_argument(std::string(name()) + ": one-sided tests need a finite reference value");
      }
      if (positive_domain() && !(theta0_ > 0.0)) {
        throw invalid_argument(std::string(name()) + ": reference value must be positive");
      }
    }
    check_nuisance();
  }

  static bool two_sample_test(CatalogTest t) {
    const Quantity q = catalog_entry(t).quantity;
    return q == Quantity::MuDiff || q == Quantity::SigmaRatio;
  }

  static void check_sd(const std::optional<double>& v, const std::string& what) {
    if (v && !(std::isfinite(*v) && *v > 0.0)) {
      throw invalid_argument(what + " must be positive and finite");
    }
  }

  void check_nuisance() const {
    check_sd(known_.sigma, "sigma");
    check_sd(known_.sigma1, "sigma1");
    check_sd(known_.sigma2, "sigma2");
    if (entry_->estimator == Estimator::MuBar && !known_.sigma) {
      throw missing_nuisance(std::string(name()) +
                             " assumes a known sigma; supply it, or use the mean-t test when sigma is unknown");
    }
    if (entry_->estimator == Estimator::DiffMuBar && !(known_.sigma1 && known_.sigma2)) {
      throw missing_nuisance(std::string(name()) +
                             " assumes known sigma1 and sigma2; supply both (no unknown-variance variant is provided)");
    }
  }

  const CatalogEntry* entry_;
  int n_;
  int m_;
  double theta0_;
  KnownNuisance known_;
};

namespace detail {

inline void check_sample(const TestProblem& p, const Sample& s) {
  if (s.x.size() != static_cast<std::size_t>(p.n())) {
    throw invalid_argument(std::string(p.name()) + ": expected " + std::to_string(p.n()) +
                           " values in x, got " + std::to_string(s.x.size()));
  }
  if (p.two_sample() && s.y.size() != static_cast<std::size_t>(p.m())) {
    throw invalid_argument(std::string(p.name()) + ": expected " + std::to_string(p.m()) +
                           " values in y, got " + std::to_string(s.y.size()));
  }
}

inline void check_level(double level, const char* who) {
  if (!(level > 0.0 && level < 1.0)) throw invalid_argument(std::string(who) + ": level must lie in (0, 1)");
}

inline double positive_or_least(double eta) {
  return eta > 0.0 ? eta : std::numeric_limits<double>::denorm_min();
}

inline const State& one_sample(const TestProblem& p, const ModelState& w) {
  if (p.two_sample() || !std::holds_alternative<State>(w)) {
    throw invalid_argument(std::string(p.name()) + ": state does not match the number of samples");
  }
  return std::get<State>(w);
}

inline const TwoSampleState& two_samples(const TestProblem& p, const ModelState& w) {
  if (!p.two_sample() || !std::holds_alternative<TwoSampleState>(w)) {
    throw invalid_argument(std::string(p.name()) + ": state does not match the number of samples");
  }
  return std::get<TwoSampleState>(w);
}

}  // namespace detail

/// E(x).
inline double estimate(const TestProblem& p, const Sample& s) {
  detail::check_sample(p, s);
  switch (p.estimator()) {
    case Estimator::MuBar:
    case Estimator::MuBarStudentized:
      return mu_bar(s.x);
    case Estimator::SigmaBar: {
      const double v = sigma_bar(s.x);
      if (!(v > 0.0)) throw degenerate_sample(std::string(p.name()) + ": sigma_bar(x) is zero (all values equal)");
      return v;
    }
    case Estimator::DiffMuBar:
      return mu_bar(s.x) - mu_bar(s.y);
    case Estimator::SigmaPrimeRatio: {
      const double a = sigma_bar_prime(s.x);
      const double b = sigma_bar_prime(s.y);
      if (!(a > 0.0) || !(b > 0.0)) {
        throw degenerate_sample(std::string(p.name()) + ": a sample has all values equal");
      }
      const double r = a / b;
      if (!(r > 0.0) || !std::isfinite(r)) throw degenerate_sample(std::string(p.name()) + ": ratio out of range");
      return r;
    }
  }
  return 0.0;
}

/// The semi-distance d^x; `s` is consulted only by the studentized kinds.
inline SemiDistance semidistance(const TestProblem& p, const Sample& s) {
  switch (p.distance_kind()) {
    case SemiDistanceKind::Absolute: return SemiDistance::absolute();
    case SemiDistanceKind::HalfLineAbsolute: return SemiDistance::half_line_absolute(p.theta0());
    case SemiDistanceKind::LogRatio: return SemiDistance::log_ratio();
    case SemiDistanceKind::HalfLineLogRatio: return SemiDistance::half_line_log_ratio(p.theta0());
    case SemiDistanceKind::Studentized:
      detail::check_sample(p, s);
      return SemiDistance::studentized(s.x);
    case SemiDistanceKind::HalfLineStudentized:
      detail::check_sample(p, s);
      return SemiDistance::half_line_studentized(p.theta0(), s.x);
  }
  throw invalid_argument("unknown semi-distance kind");
}

/// The semi-distance of the data-independent kinds.
inline SemiDistance semidistance(const TestProblem& p) {
  if (p.studentized()) throw invalid_argument(std::string(p.name()) + ": semi-distance depends on the sample");
  return semidistance(p, Sample{});
}

/// pi(w).
inline double quantity(const TestProblem& p, const ModelState& w) {
  switch (p.quantity()) {
    case Quantity::Mu: return detail::one_sample(p, w).mu;
    case Quantity::Sigma: return detail::one_sample(p, w).sigma;
    case Quantity::MuDiff: {
      const TwoSampleState& t = detail::two_samples(p, w);
      return t.first.mu - t.second.mu;
    }
    case Quantity::SigmaRatio: {
      const TwoSampleState& t = detail::two_samples(p, w);
      return t.first.sigma / t.second.sigma;
    }
  }
  return 0.0;
}

/// A state with pi(state) = theta, using the known nuisance where the
/// problem has one (1 otherwise).
inline ModelState state_with_quantity(const TestProblem& p, double theta) {
  const KnownNuisance& k = p.known();
  switch (p.quantity()) {
    case Quantity::Mu: return State(theta, k.sigma.value_or(1.0));
    case Quantity::Sigma: return State(0.0, theta);
    case Quantity::MuDiff:
      return TwoSampleState{State(theta, k.sigma1.value_or(1.0)), State(0.0, k.sigma2.value_or(1.0))};
    case Quantity::SigmaRatio: return TwoSampleState{State(0.0, theta), State(0.0, 1.0)};
  }
  throw invalid_argument("unknown quantity");
}

/// Smallest eta with P_w(d^x(E(x), pi(w)) < eta) >= gamma, in closed form.
/// One-sided kinds use the value at the reference point for every w; a
/// non-positive value is replaced by the least positive double.
inline double eta_gamma(const TestProblem& p, const ModelState& w, double gamma) {
  detail::check_level(gamma, "eta_gamma");
  const double tail = 1.0 - gamma;
  const int n = p.n();
  const int m = p.m();
  const double rn = std::sqrt(static_cast<double>(n));
  switch (p.test()) {
    case CatalogTest::MeanZ:
      return detail::one_sample(p, w).sigma / rn * z_alpha(tail, TailCount::Two);
    case CatalogTest::MeanZUpper:
      return detail::positive_or_least(detail::one_sample(p, w).sigma / rn * z_alpha(tail, TailCount::One));
    case CatalogTest::Variance:
      detail::one_sample(p, w);
      return symmetric_log_interval_eta(DistributionSpec::chi_squared(n - 1), n, tail);
    case CatalogTest::VarianceUpper: {
      detail::one_sample(p, w);
      const DistributionSpec chi = DistributionSpec::chi_squared(n - 1);
      if (tail >= sf(chi, n)) return detail::positive_or_least(0.0);
      return upper_tail_log_eta(chi, n, tail);
    }
    case CatalogTest::MeanDifference:
    case CatalogTest::MeanDifferenceUpper: {
      const TwoSampleState& t = detail::two_samples(p, w);
      const double spread =
          std::sqrt(t.first.sigma * t.first.sigma / n + t.second.sigma * t.second.sigma / m);
      if (p.test() == CatalogTest::MeanDifference) return spread * z_alpha(tail, TailCount::Two);
      return detail::positive_or_least(spread * z_alpha(tail, TailCount::One));
    }
    case CatalogTest::VarianceRatio:
      detail::two_samples(p, w);
      return symmetric_log_interval_eta(DistributionSpec::fisher_f(n - 1, m - 1), n, tail);
    case CatalogTest::VarianceRatioUpper: {
      detail::two_samples(p, w);
      const DistributionSpec f = DistributionSpec::fisher_f(n - 1, m - 1);
      if (tail >= sf(f, 1.0)) return detail::positive_or_least(0.0);
      return upper_tail_log_eta(f, n, tail);
    }
    case CatalogTest::MeanT:
      detail::one_sample(p, w);
      return upper_quantile(DistributionSpec::student_t(n - 1), 0.5 * tail);
    case CatalogTest::MeanTUpper:
      detail::one_sample(p, w);
      return detail::positive_or_least(upper_quantile(DistributionSpec::student_t(n - 1), tail));
  }
  throw invalid_argument("unknown catalog test");
}

/// eta^alpha = eta^{1 - alpha}.
inline double eta_alpha(const TestProblem& p, const ModelState& w, double alpha) {
  detail::check_level(alpha, "eta_alpha");
  return eta_gamma(p, w, 1.0 - alpha);
}

/// D^gamma_x = {theta : d^x(E(x), theta) < eta}, with its endpoints.
struct ConfidenceRegion {
  SemiDistance distance;
  double estimate;
  double eta;
  double gamma;
  /// Open interval (lo, hi); lo is -inf or 0 when unbounded below in Theta.
  double lo;
  double hi;

  bool contains(double theta) const {
    if (distance.positive_domain() && !(theta > 0.0 && std::isfinite(theta))) return false;
    return distance(estimate, theta) < eta;
  }
};

namespace detail {

inline ConfidenceRegion make_confidence_region(const SemiDistance& d, double estimate, double eta,
                                               double gamma) {
  const double e = d.transform(estimate);
  const double lower_limit = d.positive_domain() ? 0.0 : -kInfinity;
  ConfidenceRegion r{d, estimate, eta, gamma, 0.0, 0.0};
  if (d.half_line()) {
    const double c = d.transform(d.theta0());
    if (e < c + eta) {
      r.lo = lower_limit;
      r.hi = d.inverse_transform(std::max(e, c) + eta);
      return r;
    }
  }
  r.lo = d.inverse_transform(e - eta);
  r.hi = d.inverse_transform(e + eta);
  return r;
}

}  // namespace detail

/// A confidence procedure with its radius computed once; applying it to a
/// sample gives D^gamma_x.
class ConfidenceProcedure {
 public:
  ConfidenceProcedure(TestProblem problem, double gamma)
      : problem_(std::move(problem)), gamma_(gamma),
        eta_(eta_gamma(problem_, state_with_quantity(problem_, reference_value(problem_)), gamma)) {}

  const TestProblem& problem() const { return problem_; }
  double gamma() const { return gamma_; }
  double eta() const { return eta_; }

  ConfidenceRegion operator()(const Sample& s) const {
    return detail::make_confidence_region(semidistance(problem_, s), estimate(problem_, s), eta_, gamma_);
  }

  /// theta in D^gamma_x, without building the endpoints.
  bool covers(const Sample& s, double theta) const {
    const SemiDistance d = semidistance(problem_, s);
    if (d.positive_domain() && !(theta > 0.0 && std::isfinite(theta))) return false;
    return d(estimate(problem_, s), theta) < eta_;
  }

 private:
  static double reference_value(const TestProblem& p) {
    if (std::isfinite(p.theta0())) return p.theta0();
    return p.positive_domain() ? 1.0 : 0.0;
  }

  TestProblem problem_;
  double gamma_;
  double eta_;
};

inline ConfidenceRegion confidence_region(const TestProblem& p, const Sample& s, double gamma) {
  return ConfidenceProcedure(p, gamma)(s);
}

/// Rejection region for a null hypothesis, or its complement (sure region)
/// for a sure hypothesis. The predicate is over full samples since the
/// studentized kinds measure distance in units of the sample's own scale.
class Region {
 public:
  enum class Role { Rejection, Sure };

  Region(TestProblem problem, Hypothesis h, Role role, double level, double eta)
      : problem_(std::move(problem)), hypothesis_(h), role_(role), level_(level), eta_(eta) {}

  const TestProblem& problem() const { return problem_; }
  const Hypothesis& hypothesis() const { return hypothesis_; }
  Role role() const { return role_; }
  /// alpha for a rejection region, gamma for a sure region.
  double level() const { return level_; }
  double eta() const { return eta_; }
  double center() const { return hypothesis_.value; }

  /// d^x(E(x), theta0).
  double statistic(const Sample& s) const {
    return semidistance(problem_, s)(estimate(problem_, s), hypothesis_.value);
  }

  bool contains(const Sample& s) const {
    const bool far = statistic(s) >= eta_;
    return role_ == Role::Rejection ? far : !far;
  }

  /// The region as a set of estimate values; `s` supplies the scale of the
  /// studentized kinds and is otherwise ignored.
  IntervalUnion estimate_set(const Sample& s) const {
    const IntervalUnion reject = semidistance(problem_, s).ball_complement(hypothesis_.value, eta_);
    if (role_ == Role::Rejection) return reject;
    IntervalUnion theta = problem_.positive_domain() ? IntervalUnion{Interval::open(0.0, kInfinity)}
                                                     : IntervalUnion::real_line();
    return reject.complement().intersect(theta);
  }

  IntervalUnion estimate_set() const {
    if (problem_.studentized()) {
      throw invalid_argument(std::string(problem_.name()) + ": region depends on the sample scale");
    }
    return estimate_set(Sample{});
  }

 private:
  TestProblem problem_;
  Hypothesis hypothesis_;
  Role role_;
  double level_;
  double eta_;
};

namespace detail {

inline TestProblem bind_hypothesis(const TestProblem& p, const Hypothesis& h) {
  if (!std::isfinite(h.value)) throw invalid_argument("hypothesis value must be finite");
  if (p.positive_domain() && !(h.value > 0.0)) {
    throw invalid_argument(std::string(p.name()) + ": hypothesis value must be positive");
  }
  const bool point = h.kind == HypothesisKind::Point;
  if (p.half_line() && point) {
    throw invalid_argument(std::string(p.name()) + " is one-sided; use a lower half-line hypothesis");
  }
  if (!p.half_line() && !point) {
    throw invalid_argument(std::string(p.name()) + " is two-sided; use a point hypothesis");
  }
  return p.half_line() ? p.with_theta0(h.value) : p;
}

}  // namespace detail

/// {x : d^x(E(x), theta0) >= eta^alpha}.
inline Region rejection_region(const TestProblem& p, const Hypothesis& null, double alpha) {
  detail::check_level(alpha, "rejection_region");
  TestProblem bound = detail::bind_hypothesis(p, null);
  const double eta = eta_alpha(bound, state_with_quantity(bound, null.value), alpha);
  return Region(std::move(bound), null, Region::Role::Rejection, alpha, eta);
}

/// Complement of the rejection region at alpha = 1 - gamma.
inline Region sure_region(const TestProblem& p, const Hypothesis& sure, double gamma) {
  detail::check_level(gamma, "sure_region");
  TestProblem bound = detail::bind_hypothesis(p, sure);
  const double eta = eta_alpha(bound, state_with_quantity(bound, sure.value), 1.0 - gamma);
  return Region(std::move(bound), sure, Region::Role::Sure, gamma, eta);
}

struct TestResult {
  bool reject;
  double statistic;
  double eta;
  double alpha;
  Region region;
};

inline TestResult run_test(const TestProblem& p, const Hypothesis& null, double alpha, const Sample& s) {
  Region region = rejection_region(p, null, alpha);
  const double stat = region.statistic(s);
  return TestResult{stat >= region.eta(), stat, region.eta(), alpha, std::move(region)};
}

}  // namespace semidist
