#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "semidist/errors.hpp"
#include "semidist/inference.hpp"

using namespace semidist;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kNormalizedLik002At01 = 0.5083045244211595831;

// Coarse-to-fine grid search for the maximum of the log-likelihood over a
// region given by its membership predicate.
State grid_search(const std::vector<double>& x, const ParameterRegion& region, double mu_lo, double mu_hi,
                  double sigma_lo, double sigma_hi) {
  State best(0.5 * (mu_lo + mu_hi), 0.5 * (sigma_lo + sigma_hi));
  double best_ll = -INFINITY;
  for (int level = 0; level < 6; ++level) {
    const int steps = 80;
    for (int i = 0; i <= steps; ++i) {
      for (int j = 0; j <= steps; ++j) {
        const State s(mu_lo + (mu_hi - mu_lo) * i / steps, sigma_lo + (sigma_hi - sigma_lo) * j / steps);
        if (!region.contains(s)) continue;
        const double ll = log_likelihood(x, s);
        if (ll > best_ll) {
          best_ll = ll;
          best = s;
        }
      }
    }
    const double dm = 2.0 * (mu_hi - mu_lo) / steps;
    const double ds = 2.0 * (sigma_hi - sigma_lo) / steps;
    mu_lo = best.mu - dm;
    mu_hi = best.mu + dm;
    sigma_lo = std::max(1e-6, best.sigma - ds);
    sigma_hi = best.sigma + ds;
  }
  return best;
}

}  // namespace

TEST_CASE("full-model MLE is the sample mean and sigma_bar") {
  const std::vector<double> x{1.0, 2.0, 3.0};
  const State s = mle_normal(x);
  CHECK(s.mu == 2.0);
  CHECK_THAT(s.sigma, WithinRel(std::sqrt(2.0 / 3.0), 1e-15));
  CHECK_THROWS_AS(mle_normal(std::vector<double>{4.0, 4.0}), semidist::degenerate_sample);
  CHECK_THROWS_AS(mle_normal(std::vector<double>{4.0}), semidist::invalid_argument);
}

TEST_CASE("constrained MLE closed forms") {
  const std::vector<double> x{1.0, 2.0, 3.0};
  CHECK_THAT(mle_normal(x, ParameterRegion::mu_fixed(2.0)).sigma, WithinRel(std::sqrt(2.0 / 3.0), 1e-15));
  CHECK_THAT(mle_normal(x, ParameterRegion::mu_fixed(0.0)).sigma, WithinRel(std::sqrt(14.0 / 3.0), 1e-15));
  const State sf = mle_normal(x, ParameterRegion::sigma_fixed(5.0));
  CHECK(sf.mu == 2.0);
  CHECK(sf.sigma == 5.0);
  const State up = mle_normal(x, ParameterRegion::mu_half_line(2.5, Side::Upper));
  CHECK(up.mu == 2.5);
  CHECK_THAT(up.sigma, WithinRel(std::sqrt((2.25 + 0.25 + 0.25) / 3.0), 1e-15));
  CHECK(mle_normal(x, ParameterRegion::mu_half_line(2.5, Side::Lower)).mu == 2.0);
  CHECK_THROWS_AS(mle_normal(std::vector<double>{2.0, 2.0}, ParameterRegion::mu_fixed(2.0)),
                  semidist::degenerate_sample);
}

TEST_CASE("half-line MLE matches a grid search on random samples") {
  Stream s(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Sample smp = sample(State(s.normal(), 0.5 + s.uniform()), 8, s);
    const double m = mu_bar(smp.x);
    const ParameterRegion region = ParameterRegion::mu_half_line(m + 0.2 + s.uniform(), Side::Upper);
    const State fit = mle_normal(smp.x, region);
    const State grid = grid_search(smp.x, region, m - 3.0, m + 4.0, 0.05, 6.0);
    CHECK(fit.mu == region.value());
    CHECK_THAT(fit.mu, WithinAbs(grid.mu, 1e-4));
    CHECK_THAT(fit.sigma, WithinAbs(grid.sigma, 1e-4));
  }
}

TEST_CASE("custom-region MLE matches the cone closed form") {
  Stream s(23);
  for (int trial = 0; trial < 10; ++trial) {
    const Sample smp = sample(State(s.normal(), 0.5 + s.uniform()), 10, s);
    // K = {mu >= 2 sigma}. In a = mu/sigma, t = 1/sigma the log-likelihood is
    // n log t - sum (x t - a)^2 / 2, jointly concave, and K is a >= 2. When the
    // free maximizer has a < 2 the optimum sits on a = 2 where
    // S2 t^2 - 2 S1 t - n = 0.
    const ParameterRegion cone = ParameterRegion::custom(
        [](const State& w) { return w.mu >= 2.0 * w.sigma; }, State(5.0, 1.0));
    const State free = mle_normal(smp.x);
    REQUIRE(free.mu < 2.0 * free.sigma);
    double s1 = 0.0;
    double s2 = 0.0;
    for (double v : smp.x) {
      s1 += v;
      s2 += v * v;
    }
    const double n = static_cast<double>(smp.x.size());
    const double t = (s1 + std::sqrt(s1 * s1 + s2 * n)) / s2;
    const State exact(2.0 / t, 1.0 / t);
    const State fit = mle_normal(smp.x, cone);
    CHECK(cone.contains(fit));
    CHECK(log_likelihood(smp.x, fit) >= log_likelihood(smp.x, exact) - 1e-9);
    CHECK_THAT(fit.mu, WithinRel(exact.mu, 1e-4));
    CHECK_THAT(fit.sigma, WithinRel(exact.sigma, 1e-4));
  }
  const ParameterRegion all = ParameterRegion::custom([](const State&) { return true; }, State(0.0, 1.0));
  const std::vector<double> x{1.0, 2.0, 3.0};
  CHECK(mle_normal(x, all) == mle_normal(x));
  CHECK_THROWS_AS(ParameterRegion::custom([](const State& w) { return w.mu > 0.0; }, State(-1.0, 1.0)),
                  semidist::invalid_argument);
}

TEST_CASE("log-likelihood is stationary at the MLE") {
  Stream s(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Sample smp = sample(State(10.0 * s.normal(), 0.1 + 5.0 * s.uniform()), 5 + trial % 20, s);
    const State top = mle_normal(smp.x);
    const double h = 1e-5 * top.sigma;
    const double n = static_cast<double>(smp.x.size());
    const double dmu = (log_likelihood(smp.x, State(top.mu + h, top.sigma)) -
                        log_likelihood(smp.x, State(top.mu - h, top.sigma))) / (2.0 * h);
    const double dsigma = (log_likelihood(smp.x, State(top.mu, top.sigma + h)) -
                           log_likelihood(smp.x, State(top.mu, top.sigma - h))) / (2.0 * h);
    // Gradients in units of n / sigma, the natural scale of the score.
    CHECK(std::abs(dmu) * top.sigma / n <= 1e-6);
    CHECK(std::abs(dsigma) * top.sigma / n <= 1e-6);
  }
}

TEST_CASE("normalized likelihood") {
  const std::vector<double> x{1.0, 2.0, 3.0};
  CHECK_THAT(normalized_likelihood(x, State(2.0, std::sqrt(2.0 / 3.0))), WithinAbs(1.0, 1e-15));
  CHECK(normalized_likelihood(x, State(2.0, 1e6)) < 1e-10);
  CHECK_THAT(normalized_likelihood(std::vector<double>{0.0, 0.0, 2.0}, State(0.0, 1.0)),
             WithinRel(kNormalizedLik002At01, 1e-13));
  CHECK_THROWS_AS(normalized_likelihood(std::vector<double>{1.0, 1.0}, State(1.0, 1.0)), semidist::degenerate_sample);

  Stream s(8);
  for (int i = 0; i < 1000; ++i) {
    const State w(2.0 + 2.0 * s.normal(), 0.1 + 3.0 * s.uniform());
    CHECK(normalized_likelihood(x, w) <= 1.0);
  }
  const LikelihoodValue v = likelihood(x, State(2.5, 1.0), ParameterRegion::mu_half_line(2.5, Side::Upper));
  CHECK_THAT(v.normalized_ratio, WithinAbs(std::exp(v.log_likelihood - log_likelihood(x, mle_normal(
                                                         x, ParameterRegion::mu_half_line(2.5, Side::Upper)))),
                                           1e-15));
}

TEST_CASE("lrt_lambda") {
  const MeanModel model{2.0, 4};  // spread 1
  CHECK(lrt_lambda(3.0, model, Hypothesis::point(3.0)) == 1.0);
  CHECK_THAT(lrt_lambda(4.0, model, Hypothesis::point(3.0)), WithinRel(std::exp(-0.5), 1e-15));
  CHECK(lrt_lambda(-7.0, model, Hypothesis::lower_half_line(3.0)) == 1.0);
  CHECK_THAT(lrt_lambda(5.0, model, Hypothesis::lower_half_line(3.0)), WithinRel(std::exp(-2.0), 1e-15));
}

TEST_CASE("calibrated LRT region matches the z threshold") {
  for (double alpha : {0.01, 0.05, 0.1}) {
    for (int n : {5, 10, 25}) {
      const MeanModel model{1.3, n};
      const LrtRegion r = lrt_region(Hypothesis::point(0.4), alpha, model);
      CHECK_THAT(r.threshold, WithinAbs(model.spread() * z_alpha(alpha, TailCount::Two), 1e-9));
      CHECK(lrt_exceedance(Hypothesis::point(0.4), model, -std::log(r.epsilon)) <= alpha + 1e-12);
      const LrtRegion one = lrt_region(Hypothesis::lower_half_line(0.4), alpha, model);
      CHECK_THAT(one.threshold, WithinAbs(model.spread() * z_alpha(alpha, TailCount::One), 1e-9));
    }
  }
}

TEST_CASE("LRT regions grow with alpha and shrink with the null") {
  const MeanModel model{1.0, 9};
  const LrtRegion small = lrt_region(Hypothesis::point(0.0), 0.01, model);
  const LrtRegion large = lrt_region(Hypothesis::point(0.0), 0.5, model);
  CHECK(small.threshold > large.threshold);
  for (double theta = -3.0; theta <= 3.0; theta += 0.01) {
    if (small.contains(theta)) CHECK(large.contains(theta));
    // At a common epsilon, the bigger null gives the smaller region.
    const bool in_point = lrt_lambda(theta, model, Hypothesis::point(0.0)) <= 0.2;
    const bool in_half = lrt_lambda(theta, model, Hypothesis::lower_half_line(0.0)) <= 0.2;
    if (in_half) CHECK(in_point);
  }
  const LrtRegion near_one = lrt_region(Hypothesis::point(0.0), 1.0 - 1e-9, model);
  CHECK(near_one.threshold < 1e-6);
}

TEST_CASE("LRT size by simulation") {
  const MeanModel model{1.0, 10};
  const LrtRegion r = lrt_region(Hypothesis::point(0.0), 0.05, model);
  const long reps = 100000;
  long hits = 0;
  for (long j = 0; j < reps; ++j) {
    Stream stream(2718, static_cast<std::uint64_t>(j));
    if (r.contains(mu_bar(sample(State(0.0, 1.0), 10, stream).x))) ++hits;
  }
  CHECK(static_cast<double>(hits) / reps <= 0.05 + 4.0 * std::sqrt(0.05 * 0.95 / reps));
}
