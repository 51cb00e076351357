#pragma once

// The normal measurement model: states, interval probabilities of the normal
// observable and its n-fold products, the image laws of the sample mean and
// sum of squares, the estimator maps, and sampling.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "semidist/distributions.hpp"
#include "semidist/errors.hpp"
#include "semidist/interval_set.hpp"
#include "semidist/random.hpp"

namespace semidist {

/// A point (mu, sigma) of R x R_+.
struct State {
  double mu;
  double sigma;

  State(double mu_, double sigma_) : mu(mu_), sigma(sigma_) {
    if (!std::isfinite(mu) || !std::isfinite(sigma) || !(sigma > 0.0)) {
      throw invalid_argument("State: mu must be finite and sigma positive and finite");
    }
  }

  friend bool operator==(const State&, const State&) = default;
};

/// States of two independent normal populations.
struct TwoSampleState {
  State first;
  State second;

  friend bool operator==(const TwoSampleState&, const TwoSampleState&) = default;
};

/// A measured value x, and y for two-sample problems (empty otherwise).
struct Sample {
  std::vector<double> x;
  std::vector<double> y;
};

namespace detail {

inline void check_values(std::span<const double> x, std::size_t min_size, const char* who) {
  if (x.size() < min_size) {
    throw invalid_argument(std::string(who) + ": need at least " + std::to_string(min_size) +
                           " value(s), got " + std::to_string(x.size()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw invalid_argument(std::string(who) + ": values must be finite");
  }
}

// Mean computed as x0 + mean(x - x0), exact for constant samples.
inline double shifted_mean(std::span<const double> x) {
  const double x0 = x[0];
  double sum = 0.0;
  for (double v : x) sum += v - x0;
  return x0 + sum / static_cast<double>(x.size());
}

// Mass of [lo, hi] from a function returning both tails; the smaller-tail
// side is used so far-tail intervals keep relative accuracy.
template <class TailsAt>
double tail_difference(TailsAt&& tails_at, double lo, double hi) {
  if (!(lo < hi)) return 0.0;
  const special::Tails a = tails_at(lo);
  const special::Tails b = tails_at(hi);
  const double mass = a.lower >= 0.5 ? a.upper - b.upper : b.lower - a.lower;
  return std::max(0.0, mass);
}

template <class TailsAt, class Map>
double union_mass(const IntervalUnion& set, TailsAt&& tails_at, Map&& map) {
  double total = 0.0;
  for (const Interval& part : set.parts()) total += tail_difference(tails_at, map(part.lo), map(part.hi));
  return std::min(1.0, total);
}

inline void check_size(int n, int min_n, const char* who) {
  if (n < min_n) {
    throw invalid_argument(std::string(who) + ": sample size must be >= " + std::to_string(min_n));
  }
}

}  // namespace detail

/// Arithmetic mean.
inline double mu_bar(std::span<const double> x) {
  detail::check_values(x, 1, "mu_bar");
  return detail::shifted_mean(x);
}

/// Sum of squared deviations from the mean.
inline double ss_bar(std::span<const double> x) {
  detail::check_values(x, 1, "ss_bar");
  const double m = detail::shifted_mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss;
}

/// sqrt(SS / n).
inline double sigma_bar(std::span<const double> x) {
  const double ss = ss_bar(x);
  return std::sqrt(ss / static_cast<double>(x.size()));
}

/// sqrt(SS / (n - 1)); needs n >= 2.
inline double sigma_bar_prime(std::span<const double> x) {
  detail::check_values(x, 2, "sigma_bar_prime");
  return std::sqrt(ss_bar(x) / static_cast<double>(x.size() - 1));
}

/// Probability that one normal measurement under `s` lands in `set`.
inline double normal_prob(const State& s, const IntervalUnion& set) {
  const DistributionSpec z = DistributionSpec::normal();
  return detail::union_mass(
      set, [&](double u) { return detail::tails(z, u); },
      [&](double v) { return (v - s.mu) / s.sigma; });
}

/// Probability that n independent measurements land in the product of `sets`.
inline double simultaneous_prob(const State& s, std::span<const IntervalUnion> sets) {
  double p = 1.0;
  for (const IntervalUnion& set : sets) p *= normal_prob(s, set);
  return p;
}

/// P(mu_bar(x) in set) for n draws under `s`: mu_bar ~ Normal(mu, sigma / sqrt(n)).
inline double image_prob_mean(const State& s, int n, const IntervalUnion& set) {
  detail::check_size(n, 1, "image_prob_mean");
  return normal_prob(State(s.mu, s.sigma / std::sqrt(static_cast<double>(n))), set);
}

/// P(SS(x) in set) for n draws under `s`: SS / sigma^2 ~ ChiSquared(n - 1).
inline double image_prob_ss(const State& s, int n, const IntervalUnion& set) {
  detail::check_size(n, 2, "image_prob_ss");
  const DistributionSpec chi = DistributionSpec::chi_squared(n - 1);
  const double var = s.sigma * s.sigma;
  return detail::union_mass(
      set, [&](double u) { return detail::tails(chi, u); },
      [&](double v) { return std::max(v, 0.0) / var; });
}

/// P(mu_bar(x) - mu_bar(y) in set) for independent samples of sizes n and m.
inline double image_prob_mean_difference(const TwoSampleState& s, int n, int m,
                                         const IntervalUnion& set) {
  detail::check_size(n, 1, "image_prob_mean_difference");
  detail::check_size(m, 1, "image_prob_mean_difference");
  const double spread = std::sqrt(s.first.sigma * s.first.sigma / n + s.second.sigma * s.second.sigma / m);
  return normal_prob(State(s.first.mu - s.second.mu, spread), set);
}

/// P(sigma_bar_prime(x) / sigma_bar_prime(y) in set):
/// (ratio * sigma2 / sigma1)^2 ~ F(n - 1, m - 1).
inline double image_prob_sd_ratio(const TwoSampleState& s, int n, int m, const IntervalUnion& set) {
  detail::check_size(n, 2, "image_prob_sd_ratio");
  detail::check_size(m, 2, "image_prob_sd_ratio");
  const DistributionSpec f = DistributionSpec::fisher_f(n - 1, m - 1);
  const double k = s.second.sigma / s.first.sigma;
  return detail::union_mass(
      set, [&](double u) { return detail::tails(f, u); },
      [&](double v) {
        const double r = std::max(v, 0.0) * k;
        return r * r;
      });
}

/// n independent draws from Normal(mu, sigma^2).
inline Sample sample(const State& s, int n, Stream& stream) {
  detail::check_size(n, 1, "sample");
  Sample out;
  out.x.resize(static_cast<std::size_t>(n));
  for (double& v : out.x) v = s.mu + s.sigma * stream.normal();
  return out;
}

inline Sample sample(const State& s, int n, std::uint64_t seed) {
  Stream stream(seed);
  return sample(s, n, stream);
}

/// Independent blocks of sizes n (first state) and m (second state).
inline Sample sample(const TwoSampleState& s, int n, int m, Stream& stream) {
  detail::check_size(m, 1, "sample");
  Sample out = sample(s.first, n, stream);
  out.y.resize(static_cast<std::size_t>(m));
  for (double& v : out.y) v = s.second.mu + s.second.sigma * stream.normal();
  return out;
}

inline Sample sample(const TwoSampleState& s, int n, int m, std::uint64_t seed) {
  Stream stream(seed);
  return sample(s, n, m, stream);
}

}  // namespace semidist
