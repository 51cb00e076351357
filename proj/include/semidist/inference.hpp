#pragma once

// Maximum likelihood for the normal model and the likelihood ratio test for
// the mean with sigma known.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <utility>

#include "semidist/errors.hpp"
#include "semidist/interval_set.hpp"
#include "semidist/measurement.hpp"
#include "semidist/root_finding.hpp"
#include "semidist/semidistance.hpp"

namespace semidist {

enum class Side { Lower, Upper };

/// The constraint set K for constrained maximum likelihood.
class ParameterRegion {
 public:
  enum class Kind { Full, MuFixed, MuHalfLine, SigmaFixed, Custom };
  using Predicate = std::function<bool(const State&)>;

  static ParameterRegion full() { return ParameterRegion(Kind::Full); }
  static ParameterRegion mu_fixed(double mu0) {
    ParameterRegion r(Kind::MuFixed);
    r.value_ = finite(mu0, "mu_fixed");
    return r;
  }
  /// mu <= mu0 (Lower) or mu >= mu0 (Upper).
  static ParameterRegion mu_half_line(double mu0, Side side) {
    ParameterRegion r(Kind::MuHalfLine);
    r.value_ = finite(mu0, "mu_half_line");
    r.side_ = side;
    return r;
  }
  static ParameterRegion sigma_fixed(double sigma0) {
    if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) {
      throw invalid_argument("sigma_fixed: sigma0 must be positive and finite");
    }
    ParameterRegion r(Kind::SigmaFixed);
    r.value_ = sigma0;
    return r;
  }
  /// Any K given by a membership predicate; `seed` must lie in K and starts
  /// the numerical search.
  static ParameterRegion custom(Predicate contains, State seed) {
    if (!contains) throw invalid_argument("custom region: empty predicate");
    if (!contains(seed)) throw invalid_argument("custom region: seed state is not in the region");
    ParameterRegion r(Kind::Custom);
    r.predicate_ = std::move(contains);
    r.seed_ = seed;
    return r;
  }

  Kind kind() const { return kind_; }
  double value() const { return value_; }
  Side side() const { return side_; }
  const State& seed() const { return seed_; }

  bool contains(const State& s) const {
    switch (kind_) {
      case Kind::Full: return true;
      case Kind::MuFixed: return s.mu == value_;
      case Kind::MuHalfLine: return side_ == Side::Lower ? s.mu <= value_ : s.mu >= value_;
      case Kind::SigmaFixed: return s.sigma == value_;
      case Kind::Custom: return predicate_(s);
    }
    return false;
  }

 private:
  explicit ParameterRegion(Kind kind) : kind_(kind) {}

  static double finite(double v, const char* who) {
    if (!std::isfinite(v)) throw invalid_argument(std::string(who) + ": value must be finite");
    return v;
  }

  Kind kind_;
  double value_ = 0.0;
  Side side_ = Side::Lower;
  Predicate predicate_;
  State seed_{0.0, 1.0};
};

struct LikelihoodValue {
  double log_likelihood;
  /// exp(log_likelihood - sup over K of the log-likelihood).
  double normalized_ratio;
};

/// log prod_k N(x_k; mu, sigma^2).
inline double log_likelihood(std::span<const double> x, const State& s) {
  detail::check_values(x, 1, "log_likelihood");
  double q = 0.0;
  for (double v : x) {
    const double z = (v - s.mu) / s.sigma;
    q += z * z;
  }
  const double n = static_cast<double>(x.size());
  return -n * std::log(s.sigma) - 0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * q;
}

namespace detail {

inline double rms_about(std::span<const double> x, double center) {
  double q = 0.0;
  for (double v : x) q += (v - center) * (v - center);
  return std::sqrt(q / static_cast<double>(x.size()));
}

inline State state_or_degenerate(double mu, double sigma, const char* who) {
  if (!(sigma > 0.0)) {
    throw degenerate_sample(std::string(who) + ": maximizing sigma is 0, outside the state space");
  }
  return State(mu, sigma);
}

// Nelder-Mead minimization in two dimensions.
// The initial simplex has edges of length `step` along two orthogonal
// directions rotated by `angle`.
template <class F>
std::pair<std::array<double, 2>, double> nelder_mead(F&& f, std::array<double, 2> start, double step,
                                                     double angle, int max_evaluations) {
  using Point = std::array<double, 2>;
  std::array<Point, 3> pts{start, start, start};
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  pts[1][0] += step * c;
  pts[1][1] += step * s;
  pts[2][0] -= step * s;
  pts[2][1] += step * c;
  std::array<double, 3> vals{f(pts[0]), f(pts[1]), f(pts[2])};
  int evaluations = 3;
  auto combine = [](const Point& a, const Point& b, double t) {
    return Point{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
  };
  while (evaluations < max_evaluations) {
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = order[0];
    const int mid = order[1];
    const int worst = order[2];
    const double spread = std::abs(vals[worst] - vals[best]);
    const double size = std::max(std::abs(pts[worst][0] - pts[best][0]) + std::abs(pts[worst][1] - pts[best][1]),
                                 std::abs(pts[mid][0] - pts[best][0]) + std::abs(pts[mid][1] - pts[best][1]));
    if (spread <= 1e-15 * (std::abs(vals[best]) + 1e-300) && size < 1e-12) break;
    if (size < 1e-14) break;

    const Point centroid{0.5 * (pts[best][0] + pts[mid][0]), 0.5 * (pts[best][1] + pts[mid][1])};
    const Point reflected = combine(centroid, pts[worst], -1.0);
    const double fr = f(reflected);
    ++evaluations;
    if (fr < vals[best]) {
      const Point expanded = combine(centroid, pts[worst], -2.0);
      const double fe = f(expanded);
      ++evaluations;
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[mid]) {
      pts[worst] = reflected;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const Point contracted = combine(centroid, outside ? reflected : pts[worst], 0.5);
    const double fc = f(contracted);
    ++evaluations;
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = contracted;
      vals[worst] = fc;
      continue;
    }
    for (int i : {mid, worst}) {
      pts[i] = combine(pts[best], pts[i], 0.5);
      vals[i] = f(pts[i]);
      ++evaluations;
    }
  }
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (vals[i] < vals[best]) best = i;
  }
  return {pts[best], vals[best]};
}

inline State custom_mle(std::span<const double> x, const ParameterRegion& region) {
  constexpr double kSigmaFloor = 1e-12;
  const double m = shifted_mean(x);
  const double s = rms_about(x, m);
  if (s > 0.0 && region.contains(State(m, s))) return State(m, s);

  auto to_state = [&](const std::array<double, 2>& p) {
    return State(p[0], std::max(std::exp(p[1]), kSigmaFloor));
  };
  const double scale = s > 0.0 ? s : std::max(region.seed().sigma, 1.0);
  const std::array<double, 2> anchor{region.seed().mu, std::log(region.seed().sigma)};
  auto feasible = [&](const std::array<double, 2>& p) {
    return std::isfinite(p[0]) && std::isfinite(p[1]) && p[1] < 700.0 && region.contains(to_state(p));
  };
  // Outside K the objective is its value at the last feasible point on the
  // segment from the seed, plus a quadratic penalty in the distance. This
  // keeps it continuous across the boundary so the simplex can slide along it.
  auto project = [&](const std::array<double, 2>& p) {
    if (feasible(p)) return p;
    double in = 0.0;
    double out = 1.0;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (in + out);
      const std::array<double, 2> q{anchor[0] + mid * (p[0] - anchor[0]), anchor[1] + mid * (p[1] - anchor[1])};
      if (feasible(q)) {
        in = mid;
      } else {
        out = mid;
      }
    }
    return std::array<double, 2>{anchor[0] + in * (p[0] - anchor[0]), anchor[1] + in * (p[1] - anchor[1])};
  };
  auto objective = [&](const std::array<double, 2>& p) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) return kInfinity;
    const std::array<double, 2> q = project(p);
    const double value = -log_likelihood(x, to_state(q));
    const double du = (p[0] - q[0]) / scale;
    const double dv = p[1] - q[1];
    return value + (1.0 + std::abs(value)) * (du * du + dv * dv);
  };
  // Simplices collapse against the boundary of K, so restart from the best
  // point with rotated simplices of varying size until several restarts in a
  // row stop improving.
  std::array<double, 2> start = anchor;
  double best = objective(start);
  int stale = 0;
  for (int restart = 0; restart < 200 && stale < 8; ++restart) {
    const double step = scale * std::pow(0.3, restart % 6);
    const double angle = 2.399963229728653 * restart;
    auto [point, value] = nelder_mead(objective, start, step, angle, 2000);
    if (value < best - 1e-14 * std::abs(best)) {
      stale = 0;
    } else {
      ++stale;
    }
    if (value < best) {
      best = value;
      start = point;
    }
  }
  return to_state(project(start));
}

}  // namespace detail

/// Maximum likelihood state within `region`.
inline State mle_normal(std::span<const double> x, const ParameterRegion& region = ParameterRegion::full()) {
  detail::check_values(x, 1, "mle_normal");
  switch (region.kind()) {
    case ParameterRegion::Kind::Full: {
      if (x.size() < 2) throw invalid_argument("mle_normal: the full model needs n >= 2");
      return detail::state_or_degenerate(mu_bar(x), sigma_bar(x), "mle_normal");
    }
    case ParameterRegion::Kind::MuFixed:
      return detail::state_or_degenerate(region.value(), detail::rms_about(x, region.value()), "mle_normal");
    case ParameterRegion::Kind::SigmaFixed:
      return State(mu_bar(x), region.value());
    case ParameterRegion::Kind::MuHalfLine: {
      const double m = mu_bar(x);
      const double mu = region.side() == Side::Lower ? std::min(m, region.value()) : std::max(m, region.value());
      return detail::state_or_degenerate(mu, detail::rms_about(x, mu), "mle_normal");
    }
    case ParameterRegion::Kind::Custom:
      return detail::custom_mle(x, region);
  }
  throw invalid_argument("mle_normal: unknown region");
}

/// L_x(state) / L_x(mu_bar, sigma_bar), in [0, 1].
inline double normalized_likelihood(std::span<const double> x, const State& s) {
  const State top = mle_normal(x);
  return std::exp(log_likelihood(x, s) - log_likelihood(x, top));
}

/// Log-likelihood at `s` and its ratio to the maximum over `region`.
inline LikelihoodValue likelihood(std::span<const double> x, const State& s,
                                  const ParameterRegion& region = ParameterRegion::full()) {
  const double ll = log_likelihood(x, s);
  const double top = log_likelihood(x, mle_normal(x, region));
  return {ll, std::exp(std::min(0.0, ll - top))};
}

/// The sample mean of n draws with sigma known: mu_bar ~ Normal(mu, sigma / sqrt(n)).
struct MeanModel {
  double sigma;
  int n;

  double spread() const { return sigma / std::sqrt(static_cast<double>(n)); }
};

namespace detail {

inline void check_model(const MeanModel& m) {
  if (!(m.sigma > 0.0) || !std::isfinite(m.sigma)) throw invalid_argument("MeanModel: sigma must be positive");
  if (m.n < 1) throw invalid_argument("MeanModel: n must be >= 1");
}

}  // namespace detail

/// Profile likelihood sup over the null of exp(-(theta - mu)^2 / (2 s^2)).
inline double lrt_lambda(double theta, const MeanModel& model, const Hypothesis& null) {
  detail::check_model(model);
  if (null.kind == HypothesisKind::LowerHalfLine && theta <= null.value) return 1.0;
  const double z = (theta - null.value) / model.spread();
  return std::exp(-0.5 * z * z);
}

/// R^eps = {theta : Lambda(theta) <= eps}, calibrated so the worst-case null
/// probability of E(x) in R^eps is alpha.
struct LrtRegion {
  Hypothesis null;
  MeanModel model;
  double alpha;
  double epsilon;
  /// |theta - mu0| at which Lambda reaches epsilon.
  double threshold;

  bool contains(double theta) const { return lrt_lambda(theta, model, null) <= epsilon; }

  IntervalUnion set() const {
    IntervalUnion upper{Interval::at_least(null.value + threshold)};
    if (null.kind == HypothesisKind::LowerHalfLine) return upper;
    return upper.unite(IntervalUnion{Interval::at_most(null.value - threshold)});
  }
};

namespace detail {

inline IntervalUnion lrt_set(const Hypothesis& null, double threshold) {
  return LrtRegion{null, {1.0, 1}, 0.0, 0.0, threshold}.set();
}

}  // namespace detail

/// sup over null states of P(mu_bar in R^eps), for eps = exp(-u).
inline double lrt_exceedance(const Hypothesis& null, const MeanModel& model, double u) {
  detail::check_model(model);
  const double s = model.spread();
  const IntervalUnion set = detail::lrt_set(null, s * std::sqrt(2.0 * u));
  const State boundary(null.value, model.sigma);
  double worst = image_prob_mean(boundary, model.n, set);
  if (null.kind == HypothesisKind::LowerHalfLine) {
    // Null states below mu0 on a grid out to 8 spreads.
    for (int k = 1; k <= 160; ++k) {
      const State w(null.value - 0.05 * k * s, model.sigma);
      worst = std::max(worst, image_prob_mean(w, model.n, set));
    }
  }
  return worst;
}

inline LrtRegion lrt_region(const Hypothesis& null, double alpha, const MeanModel& model) {
  detail::check_model(model);
  if (!(alpha > 0.0 && alpha < 1.0)) throw invalid_argument("lrt_region: alpha must lie in (0, 1)");
  if (!std::isfinite(null.value)) throw invalid_argument("lrt_region: null value must be finite");
  // The exceedance falls as u = -log(eps) grows; find the smallest u with
  // exceedance <= alpha.
  auto excess = [&](double u) { return alpha - lrt_exceedance(null, model, u); };
  double hi = 1.0;
  while (excess(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e6) throw calibration_error("lrt_region: calibration bracket not found");
  }
  const double u = roots::bisect_increasing(excess, 0.0, hi, 1e-16, 1e-300);
  return LrtRegion{null, model, alpha, std::exp(-u), model.spread() * std::sqrt(2.0 * u)};
}

}  // namespace semidist
