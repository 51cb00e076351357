#pragma once

// Coverage, size and power by repeated simulated measurement.
//
// Replication j always draws from Stream(seed, j), so the hit count does not
// depend on how replications are split across worker threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "semidist/errors.hpp"
#include "semidist/framework.hpp"
#include "semidist/measurement.hpp"
#include "semidist/random.hpp"

namespace semidist {

struct ExperimentPlan {
  TestProblem problem;
  ModelState truth;
  std::optional<Hypothesis> hypothesis;
  /// gamma for coverage, alpha for size and power.
  double level;
  long replications;
  std::uint64_t seed;
};

struct ExperimentReport {
  long hits;
  long replications;
  double rate;
  /// level -/+ 4 binomial standard deviations.
  double band_lo;
  double band_hi;
  bool pass;
  std::uint64_t seed;
  double level;
};

struct ExecutionOptions {
  unsigned workers = 1;
};

namespace detail {

inline void check_plan(const ExperimentPlan& plan) {
  if (plan.replications < 1) throw invalid_argument("experiment: replications must be >= 1");
  check_level(plan.level, "experiment");
  if (plan.problem.two_sample() != std::holds_alternative<TwoSampleState>(plan.truth)) {
    throw invalid_argument("experiment: truth does not match the number of samples");
  }
}

inline Sample draw(const TestProblem& p, const ModelState& truth, Stream& stream) {
  if (const auto* two = std::get_if<TwoSampleState>(&truth)) return sample(*two, p.n(), p.m(), stream);
  return sample(std::get<State>(truth), p.n(), stream);
}

inline double band_half_width(double level, long replications) {
  return 4.0 * std::sqrt(level * (1.0 - level) / static_cast<double>(replications));
}

}  // namespace detail

/// Number of j in [0, J) with hit(sample_j); sample_j comes from Stream(seed, j).
template <class Hit>
long count_hits(const TestProblem& p, const ModelState& truth, long replications, std::uint64_t seed,
                unsigned workers, Hit&& hit) {
  auto run_range = [&](long begin, long end) {
    long hits = 0;
    for (long j = begin; j < end; ++j) {
      Stream stream(seed, static_cast<std::uint64_t>(j));
      if (hit(detail::draw(p, truth, stream))) ++hits;
    }
    return hits;
  };
  const long chunks = std::clamp<long>(workers, 1, std::max<long>(replications, 1));
  if (chunks == 1) return run_range(0, replications);
  std::vector<long> partial(static_cast<std::size_t>(chunks), 0);
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(chunks));
  for (long c = 0; c < chunks; ++c) {
    const long begin = replications * c / chunks;
    const long end = replications * (c + 1) / chunks;
    threads.emplace_back([&, c, begin, end] { partial[static_cast<std::size_t>(c)] = run_range(begin, end); });
  }
  for (std::thread& t : threads) t.join();
  long total = 0;
  for (long h : partial) total += h;
  return total;
}

/// Fraction of replications whose gamma-confidence region contains pi(truth).
inline ExperimentReport coverage_experiment(const ExperimentPlan& plan, ExecutionOptions options = {}) {
  detail::check_plan(plan);
  if (plan.hypothesis) throw invalid_argument("coverage_experiment: plan must not carry a hypothesis");
  const ConfidenceProcedure procedure(plan.problem, plan.level);
  const double target = quantity(plan.problem, plan.truth);
  const long hits = count_hits(plan.problem, plan.truth, plan.replications, plan.seed, options.workers,
                               [&](const Sample& s) { return procedure.covers(s, target); });
  const double rate = static_cast<double>(hits) / static_cast<double>(plan.replications);
  const double w = detail::band_half_width(plan.level, plan.replications);
  return {hits, plan.replications, rate, plan.level - w, plan.level + w, rate >= plan.level - w, plan.seed,
          plan.level};
}

namespace detail {

inline ExperimentReport rejection_experiment(const ExperimentPlan& plan, const ModelState& truth,
                                             const Region& region, unsigned workers) {
  const long hits = count_hits(plan.problem, truth, plan.replications, plan.seed, workers,
                               [&](const Sample& s) { return region.contains(s); });
  const double rate = static_cast<double>(hits) / static_cast<double>(plan.replications);
  const double w = band_half_width(plan.level, plan.replications);
  return {hits, plan.replications, rate, plan.level - w, plan.level + w, rate <= plan.level + w, plan.seed,
          plan.level};
}

}  // namespace detail

/// Rejection frequency at a truth inside the null.
inline ExperimentReport size_experiment(const ExperimentPlan& plan, ExecutionOptions options = {}) {
  detail::check_plan(plan);
  if (!plan.hypothesis) throw invalid_argument("size_experiment: plan needs a null hypothesis");
  const double theta = quantity(plan.problem, plan.truth);
  if (!plan.hypothesis->contains(theta)) {
    throw invalid_argument("size_experiment: the truth violates the null hypothesis");
  }
  const Region region = rejection_region(plan.problem, *plan.hypothesis, plan.level);
  return detail::rejection_experiment(plan, plan.truth, region, options.workers);
}

/// Rejection frequency at each truth of `grid`. `pass` reports the size
/// criterion for truths inside the null and is true elsewhere.
inline std::vector<ExperimentReport> power_curve(const ExperimentPlan& plan, std::span<const ModelState> grid,
                                                 ExecutionOptions options = {}) {
  detail::check_plan(plan);
  if (!plan.hypothesis) throw invalid_argument("power_curve: plan needs a null hypothesis");
  if (grid.empty()) throw invalid_argument("power_curve: empty truth grid");
  const Region region = rejection_region(plan.problem, *plan.hypothesis, plan.level);
  std::vector<ExperimentReport> out;
  out.reserve(grid.size());
  for (const ModelState& truth : grid) {
    ExperimentPlan at = plan;
    at.truth = truth;
    detail::check_plan(at);
    ExperimentReport r = detail::rejection_experiment(at, truth, region, options.workers);
    if (!plan.hypothesis->contains(quantity(plan.problem, truth))) r.pass = true;
    out.push_back(r);
  }
  return out;
}

}  // namespace semidist
