#pragma once

// Rejection regions built directly from their definition: calibrate each
// null state's radius against the exact image law of the estimator, take the
// complement of that state's ball, and intersect over a set of null states.
// Used to cross-check the closed forms; studentized problems are not covered.

#include <span>
#include <string>

#include "semidist/errors.hpp"
#include "semidist/framework.hpp"
#include "semidist/interval_set.hpp"
#include "semidist/measurement.hpp"
#include "semidist/root_finding.hpp"

namespace semidist {

namespace detail {

inline IntervalUnion square_scaled(const IntervalUnion& set, double n) {
  std::vector<Interval> parts;
  for (Interval i : set.parts()) {
    i.lo = n * i.lo * i.lo;
    i.hi = n * i.hi * i.hi;
    parts.push_back(i);
  }
  return IntervalUnion(std::move(parts));
}

}  // namespace detail

/// P_w(E(x) in set), from the image law of the problem's estimator.
inline double estimator_probability(const TestProblem& p, const ModelState& w, const IntervalUnion& set) {
  switch (p.estimator()) {
    case Estimator::MuBar:
      return image_prob_mean(detail::one_sample(p, w), p.n(), set);
    case Estimator::SigmaBar: {
      // sigma_bar in set  <=>  SS = n sigma_bar^2 in n set^2 (set is inside (0, inf)).
      const IntervalUnion positive = set.intersect(IntervalUnion{Interval::open(0.0, kInfinity)});
      return image_prob_ss(detail::one_sample(p, w), p.n(), detail::square_scaled(positive, p.n()));
    }
    case Estimator::DiffMuBar:
      return image_prob_mean_difference(detail::two_samples(p, w), p.n(), p.m(), set);
    case Estimator::SigmaPrimeRatio:
      return image_prob_sd_ratio(detail::two_samples(p, w), p.n(), p.m(), set);
    case Estimator::MuBarStudentized:
      break;
  }
  throw invalid_argument(std::string(p.name()) + ": no image law for a sample-dependent semi-distance");
}

/// P_w(d(E(x), pi(w)) >= eta).
inline double exceedance_probability(const TestProblem& p, const ModelState& w, double eta) {
  const SemiDistance d = semidistance(p);
  return estimator_probability(p, w, d.ball_complement(quantity(p, w), eta));
}

/// Smallest eta with P_w(d(E(x), pi(w)) >= eta) <= alpha, by bisection.
inline double calibrated_eta(const TestProblem& p, const ModelState& w, double alpha) {
  detail::check_level(alpha, "calibrated_eta");
  auto excess = [&](double eta) { return alpha - exceedance_probability(p, w, eta); };
  double hi = 1.0;
  while (excess(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e12) throw calibration_error("calibrated_eta: no radius reaches the requested size");
  }
  return roots::bisect_increasing(excess, 0.0, hi, 1e-14, 1e-15);
}

/// Intersection over `null_states` of {theta : d(theta, pi(w)) >= eta_w}.
inline IntervalUnion generic_rejection_set(const TestProblem& p, std::span<const ModelState> null_states,
                                           double alpha) {
  if (null_states.empty()) throw invalid_argument("generic_rejection_set: no null states");
  const SemiDistance d = semidistance(p);
  IntervalUnion region = IntervalUnion::real_line();
  for (const ModelState& w : null_states) {
    const double eta = calibrated_eta(p, w, alpha);
    region = region.intersect(d.ball_complement(quantity(p, w), eta));
  }
  return region;
}

}  // namespace semidist
