#pragma once

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "data_file.hpp"
#include "semidist/semidist.hpp"

namespace semidist::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;

/// Validation failure worth reporting as-is (the message names the flag).
class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// 12 significant digits, null for non-finite values.
inline nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline std::string table_number(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

inline void row(std::ostream& out, const std::string& key, const std::string& value) {
  out << std::left << std::setw(12) << key << value << '\n';
}

inline std::string_view estimator_name(Estimator e) {
  switch (e) {
    case Estimator::MuBar:
      return "mean";
    case Estimator::SigmaBar:
      return "sd";
    case Estimator::DiffMuBar:
      return "mean-difference";
    case Estimator::SigmaPrimeRatio:
      return "sd-ratio";
    case Estimator::MuBarStudentized:
      return "mean";
  }
  return "";
}

const auto kOpenUnit = CLI::Validator(
    [](std::string& s) -> std::string {
      double v = 0.0;
      if (!CLI::detail::lexical_cast(s, v) || !(v > 0.0 && v < 1.0)) return "must lie in (0, 1), got " + s;
      return {};
    },
    "(0,1)");

const auto kPositive = CLI::Validator(
    [](std::string& s) -> std::string {
      double v = 0.0;
      if (!CLI::detail::lexical_cast(s, v) || !(std::isfinite(v) && v > 0.0)) return "must be positive, got " + s;
      return {};
    },
    "POSITIVE");

const auto kFinite = CLI::Validator(
    [](std::string& s) -> std::string {
      double v = 0.0;
      if (!CLI::detail::lexical_cast(s, v) || !std::isfinite(v)) return "must be a finite number, got " + s;
      return {};
    },
    "REAL");

struct Nuisance {
  std::optional<double> sigma;
  std::optional<double> sigma1;
  std::optional<double> sigma2;

  void add(CLI::App* app) {
    app->add_option("--sigma", sigma, "known standard deviation (mean-z tests)")->check(kPositive);
    app->add_option("--sigma1", sigma1, "known sd of the first sample (diff-means tests)")->check(kPositive);
    app->add_option("--sigma2", sigma2, "known sd of the second sample (diff-means tests)")->check(kPositive);
  }
  KnownNuisance known() const { return {sigma, sigma1, sigma2}; }
};

inline CatalogTest parse_test(const std::string& name) {
  if (auto t = parse_test_name(name)) return *t;
  std::string names;
  for (const CatalogEntry& e : kCatalog) names += std::string(names.empty() ? "" : ", ") + std::string(e.name);
  throw usage_error("unknown test '" + name + "' (expected one of " + names + ")");
}

/// Builds the problem, turning a missing nuisance into a message that names
/// the flag.
inline TestProblem make_problem(CatalogTest test, int n, int m, double theta0, const KnownNuisance& known) {
  try {
    return TestProblem::make(test, n, m, theta0, known);
  } catch (const missing_nuisance& e) {
    const bool two = catalog_entry(test).estimator == Estimator::DiffMuBar;
    throw usage_error(std::string(two ? "--sigma1/--sigma2: " : "--sigma: ") + e.what());
  }
}

inline Sample load_sample(const std::string& path, bool two_sample) {
  const DataColumns d = read_data(path);
  if (two_sample && d.columns != 2) throw usage_error(path + ": two-sample tests need two columns");
  if (!two_sample && d.columns != 1) throw usage_error(path + ": one-sample tests need a single column");
  return Sample{d.first, d.second};
}

inline bool half_line_test(CatalogTest test) {
  const SemiDistanceKind k = catalog_entry(test).distance;
  return k == SemiDistanceKind::HalfLineAbsolute || k == SemiDistanceKind::HalfLineLogRatio ||
         k == SemiDistanceKind::HalfLineStudentized;
}

inline bool two_sample_test(CatalogTest test) {
  const Quantity q = catalog_entry(test).quantity;
  return q == Quantity::MuDiff || q == Quantity::SigmaRatio;
}

inline Hypothesis hypothesis_for(CatalogTest test, double value) {
  return half_line_test(test) ? Hypothesis::lower_half_line(value) : Hypothesis::point(value);
}

inline void check_null(CatalogTest test, const std::optional<double>& value) {
  const Quantity q = catalog_entry(test).quantity;
  if (value && (q == Quantity::Sigma || q == Quantity::SigmaRatio) && !(*value > 0.0)) {
    throw usage_error("--null: " + std::string(test_name(test)) + " needs a positive value");
  }
}

inline std::uint64_t default_seed(const std::optional<std::string>& env) {
  if (!env || env->empty()) return 1;
  const std::string& s = *env;
  std::uint64_t v = 0;
  if (s.find_first_not_of("0123456789") != std::string::npos || !CLI::detail::lexical_cast(s, v)) {
    throw usage_error("SEMIDIST_SEED: expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

struct TestArgs {
  std::string test;
  std::string data;
  double null = std::nan("");
  double alpha = 0.0;
  Nuisance nuisance;
  bool json = false;
};

inline void cmd_test(const TestArgs& a, std::ostream& out) {
  const CatalogTest test = parse_test(a.test);
  check_null(test, a.null);
  const Sample s = load_sample(a.data, two_sample_test(test));
  const int n = static_cast<int>(s.x.size());
  const int m = static_cast<int>(s.y.size());
  const TestProblem p = make_problem(test, n, m, half_line_test(test) ? a.null : std::nan(""), a.nuisance.known());
  const TestResult r = run_test(p, hypothesis_for(test, a.null), a.alpha, s);
  const double est = estimate(p, s);
  if (a.json) {
    nlohmann::json j{{"test", a.test},       {"statistic", number(r.statistic)}, {"eta", number(r.eta)},
                     {"alpha", number(a.alpha)}, {"reject", r.reject},           {"null", number(a.null)},
                     {"estimate", number(est)},  {"n", n}};
    if (p.two_sample()) j["m"] = m;
    out << j.dump() << '\n';
    return;
  }
  row(out, "test", a.test);
  row(out, "n", std::to_string(n) + (p.two_sample() ? ", m " + std::to_string(m) : ""));
  row(out, "estimate", table_number(est));
  row(out, "null", (half_line_test(test) ? "<= " : "= ") + table_number(a.null));
  row(out, "statistic", table_number(r.statistic));
  row(out, "eta", table_number(r.eta));
  row(out, "alpha", table_number(a.alpha));
  row(out, "decision", r.reject ? "reject" : "no-reject");
}

struct CiArgs {
  std::string test;
  std::string data;
  std::optional<double> null;
  double gamma = 0.0;
  Nuisance nuisance;
  bool json = false;
};

inline void cmd_ci(const CiArgs& a, std::ostream& out) {
  const CatalogTest test = parse_test(a.test);
  const bool half = half_line_test(test);
  if (half && !a.null) throw usage_error("--null: one-sided tests need the reference value");
  if (!half && a.null) throw usage_error("--null: only one-sided tests take a reference value");
  check_null(test, a.null);
  const Sample s = load_sample(a.data, two_sample_test(test));
  const int n = static_cast<int>(s.x.size());
  const int m = static_cast<int>(s.y.size());
  const TestProblem p = make_problem(test, n, m, half ? *a.null : std::nan(""), a.nuisance.known());
  const ConfidenceRegion r = confidence_region(p, s, a.gamma);
  const std::string_view est_name = estimator_name(p.estimator());
  if (a.json) {
    nlohmann::json j{{"test", a.test},         {"lo", number(r.lo)},   {"hi", number(r.hi)},
                     {"gamma", number(a.gamma)}, {"estimator", est_name}, {"estimate", number(r.estimate)},
                     {"eta", number(r.eta)},     {"n", n}};
    if (p.two_sample()) j["m"] = m;
    out << j.dump() << '\n';
    return;
  }
  row(out, "test", a.test);
  row(out, "n", std::to_string(n) + (p.two_sample() ? ", m " + std::to_string(m) : ""));
  row(out, std::string(est_name), table_number(r.estimate));
  row(out, "eta", table_number(r.eta));
  row(out, "gamma", table_number(a.gamma));
  row(out, "interval", "(" + table_number(r.lo) + ", " + table_number(r.hi) + ")");
}

struct ExperimentArgs {
  std::string kind;
  std::string test;
  int n = 0;
  std::optional<int> m;
  double mu = 0.0;
  double sd = 1.0;
  double mu2 = 0.0;
  double sd2 = 1.0;
  std::optional<double> null;
  std::optional<double> alpha;
  std::optional<double> gamma;
  std::vector<double> grid;
  long reps = 10000;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  Nuisance nuisance;
  bool json = false;
};

/// Base truth with pi(truth) moved to theta by the parameter the quantity
/// reads: mu, sd, mu1 - mu2 via mu1, or sd1 / sd2 via sd1.
inline ModelState truth_with_quantity(const TestProblem& p, const ModelState& base, double theta) {
  switch (p.quantity()) {
    case Quantity::Mu:
      return State(theta, std::get<State>(base).sigma);
    case Quantity::Sigma:
      return State(std::get<State>(base).mu, theta);
    case Quantity::MuDiff: {
      const auto& b = std::get<TwoSampleState>(base);
      return TwoSampleState{State(b.second.mu + theta, b.first.sigma), b.second};
    }
    case Quantity::SigmaRatio: {
      const auto& b = std::get<TwoSampleState>(base);
      return TwoSampleState{State(b.first.mu, b.second.sigma * theta), b.second};
    }
  }
  return base;
}

inline nlohmann::json report_json(const ExperimentReport& r) {
  return {{"rate", number(r.rate)},
          {"hits", r.hits},
          {"J", r.replications},
          {"band", {number(r.band_lo), number(r.band_hi)}},
          {"pass", r.pass},
          {"seed", r.seed}};
}

inline void cmd_experiment(const ExperimentArgs& a, const std::optional<std::string>& env_seed, std::ostream& out) {
  const CatalogTest test = parse_test(a.test);
  const bool half = half_line_test(test);
  const bool two = two_sample_test(test);
  const bool coverage = a.kind == "coverage";
  if (coverage && a.alpha) throw usage_error("--alpha: coverage experiments take --gamma");
  if (!coverage && a.gamma) throw usage_error("--gamma: " + a.kind + " experiments take --alpha");
  if (coverage && !a.gamma) throw usage_error("--gamma is required for coverage experiments");
  if (!coverage && !a.alpha) throw usage_error("--alpha is required for " + a.kind + " experiments");
  if (!coverage && !a.null) throw usage_error("--null is required for " + a.kind + " experiments");
  if (coverage && half && !a.null) throw usage_error("--null: one-sided tests need the reference value");
  if (coverage && !half && a.null) throw usage_error("--null: only one-sided tests take a reference value");
  if (two && !a.m) throw usage_error("--m is required for two-sample tests");
  if (!two && a.m) throw usage_error("--m: only two-sample tests take a second sample size");
  if (a.kind == "power" && a.grid.empty()) throw usage_error("--grid is required for power experiments");
  if (a.kind != "power" && !a.grid.empty()) throw usage_error("--grid: only power experiments take a grid");
  check_null(test, a.null);

  const ModelState truth = two ? ModelState(TwoSampleState{State(a.mu, a.sd), State(a.mu2, a.sd2)})
                               : ModelState(State(a.mu, a.sd));
  // The known nuisance of the z-type tests defaults to the true sd.
  KnownNuisance known = a.nuisance.known();
  if (!known.sigma) known.sigma = a.sd;
  if (!known.sigma1) known.sigma1 = a.sd;
  if (!known.sigma2) known.sigma2 = a.sd2;
  const TestProblem p = make_problem(test, a.n, a.m.value_or(0), half && a.null ? *a.null : std::nan(""), known);
  const std::uint64_t seed = a.seed ? *a.seed : default_seed(env_seed);
  const double level = coverage ? *a.gamma : *a.alpha;
  std::optional<Hypothesis> h;
  if (!coverage) h = hypothesis_for(test, *a.null);
  const ExperimentPlan plan{p, truth, h, level, a.reps, seed};
  const ExecutionOptions options{a.workers};

  if (a.kind == "power") {
    std::vector<ModelState> grid;
    for (double theta : a.grid) grid.push_back(truth_with_quantity(p, truth, theta));
    const std::vector<ExperimentReport> curve = power_curve(plan, grid, options);
    if (a.json) {
      nlohmann::json points = nlohmann::json::array();
      for (std::size_t i = 0; i < curve.size(); ++i) {
        nlohmann::json j = report_json(curve[i]);
        j["theta"] = number(a.grid[i]);
        points.push_back(std::move(j));
      }
      out << nlohmann::json{{"kind", a.kind}, {"test", a.test}, {"alpha", number(level)}, {"seed", seed},
                            {"J", a.reps},    {"points", points}}
                 .dump()
          << '\n';
      return;
    }
    out << std::left << std::setw(14) << "theta" << std::setw(12) << "rate" << std::setw(10) << "hits"
        << "pass\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
      out << std::left << std::setw(14) << table_number(a.grid[i]) << std::setw(12) << table_number(curve[i].rate)
          << std::setw(10) << curve[i].hits << (curve[i].pass ? "yes" : "no") << '\n';
    }
    return;
  }

  const ExperimentReport r = coverage ? coverage_experiment(plan, options) : size_experiment(plan, options);
  if (a.json) {
    nlohmann::json j = report_json(r);
    j["kind"] = a.kind;
    j["test"] = a.test;
    j[coverage ? "gamma" : "alpha"] = number(level);
    out << j.dump() << '\n';
    return;
  }
  row(out, "experiment", a.kind);
  row(out, "test", a.test);
  row(out, coverage ? "gamma" : "alpha", table_number(level));
  row(out, "J", std::to_string(r.replications));
  row(out, "hits", std::to_string(r.hits));
  row(out, "rate", table_number(r.rate));
  row(out, "band", "[" + table_number(r.band_lo) + ", " + table_number(r.band_hi) + "]");
  row(out, "seed", std::to_string(r.seed));
  row(out, "pass", r.pass ? "yes" : "no");
}

}  // namespace detail

/// Runs the tool on `args` (without the program name). Returns 0 when the
/// command ran, whatever its decision, and 2 on any usage or input error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               const std::optional<std::string>& env_seed = std::nullopt) {
  using namespace detail;
  CLI::App app{"Confidence intervals, tests and coverage experiments for the normal model"};
  app.name("semidist");
  app.require_subcommand(1);

  TestArgs t;
  CLI::App* test_cmd = app.add_subcommand("test", "run a catalog test on a data file");
  test_cmd->add_option("test", t.test, "test name")->required();
  test_cmd->add_option("data", t.data, "data file, '-' for stdin")->required();
  test_cmd->add_option("--null", t.null, "null value mu0 / sigma0 / theta0 / r0")->required()->check(kFinite);
  test_cmd->add_option("--alpha", t.alpha, "significance level")->required()->check(kOpenUnit);
  t.nuisance.add(test_cmd);
  test_cmd->add_flag("--json", t.json, "print JSON");

  CiArgs c;
  CLI::App* ci_cmd = app.add_subcommand("ci", "confidence interval from a data file");
  ci_cmd->add_option("test", c.test, "test name")->required();
  ci_cmd->add_option("data", c.data, "data file, '-' for stdin")->required();
  ci_cmd->add_option("--gamma", c.gamma, "confidence level")->required()->check(kOpenUnit);
  ci_cmd->add_option("--null", c.null, "reference value of a one-sided test")->check(kFinite);
  c.nuisance.add(ci_cmd);
  ci_cmd->add_flag("--json", c.json, "print JSON");

  ExperimentArgs e;
  CLI::App* exp_cmd = app.add_subcommand("experiment", "Monte Carlo coverage, size or power");
  exp_cmd->add_option("kind", e.kind, "coverage, size or power")
      ->required()
      ->check(CLI::IsMember({"coverage", "size", "power"}));
  exp_cmd->add_option("test", e.test, "test name")->required();
  exp_cmd->add_option("--n", e.n, "first sample size")->required()->check(CLI::PositiveNumber);
  exp_cmd->add_option("--m", e.m, "second sample size")->check(CLI::PositiveNumber);
  exp_cmd->add_option("--mu", e.mu, "true mean (first sample)")->capture_default_str()->check(kFinite);
  exp_cmd->add_option("--sd", e.sd, "true sd (first sample)")->capture_default_str()->check(kPositive);
  exp_cmd->add_option("--mu2", e.mu2, "true mean of the second sample")->capture_default_str()->check(kFinite);
  exp_cmd->add_option("--sd2", e.sd2, "true sd of the second sample")->capture_default_str()->check(kPositive);
  exp_cmd->add_option("--null", e.null, "null value, or the reference value of a one-sided test")->check(kFinite);
  exp_cmd->add_option("--alpha", e.alpha, "significance level (size, power)")->check(kOpenUnit);
  exp_cmd->add_option("--gamma", e.gamma, "confidence level (coverage)")->check(kOpenUnit);
  exp_cmd->add_option("--grid", e.grid, "true quantity values for a power curve")->delimiter(',')->check(kFinite);
  exp_cmd->add_option("--reps", e.reps, "replications J")->capture_default_str()->check(CLI::PositiveNumber);
  exp_cmd->add_option("--seed", e.seed, "seed (default: SEMIDIST_SEED, else 1)");
  exp_cmd->add_option("--workers", e.workers, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  e.nuisance.add(exp_cmd);
  exp_cmd->add_flag("--json", e.json, "print JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*test_cmd) detail::cmd_test(t, out);
    if (*ci_cmd) detail::cmd_ci(c, out);
    if (*exp_cmd) detail::cmd_experiment(e, env_seed, out);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace semidist::cli
