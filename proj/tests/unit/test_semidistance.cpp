#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "semidist/errors.hpp"
#include "semidist/interval_set.hpp"
#include "semidist/random.hpp"
#include "semidist/semidistance.hpp"

using namespace semidist;
using Catch::Matchers::WithinAbs;

namespace {

// A random point of Theta for the given kind.
double draw(Stream& s, const SemiDistance& d) {
  if (d.positive_domain()) return std::exp(3.0 * (s.uniform() - 0.5) * 2.0);
  return (s.uniform() - 0.5) * 20.0;
}

SemiDistance random_kind(Stream& s, int which) {
  const std::vector<double> context{s.normal(), s.normal(), s.normal() + 1.0, s.normal(), s.normal()};
  switch (which) {
    case 0: return SemiDistance::absolute();
    case 1: return SemiDistance::half_line_absolute((s.uniform() - 0.5) * 10.0);
    case 2: return SemiDistance::log_ratio();
    case 3: return SemiDistance::half_line_log_ratio(std::exp(s.uniform() * 2.0 - 1.0));
    case 4: return SemiDistance::studentized(context);
    default: return SemiDistance::half_line_studentized((s.uniform() - 0.5) * 10.0, context);
  }
}

}  // namespace

TEST_CASE("IntervalUnion merges, intersects and complements") {
  const IntervalUnion u{Interval::closed(3.0, 5.0), Interval::closed(0.0, 1.0), Interval::open(1.0, 2.0)};
  REQUIRE(u.parts().size() == 2);
  CHECK(u.parts()[0] == Interval{0.0, 2.0, true, false});
  CHECK(u.contains(1.0));
  CHECK_FALSE(u.contains(2.0));
  CHECK(u.contains(5.0));

  const IntervalUnion v{Interval::at_least(1.5)};
  const IntervalUnion w = u.intersect(v);
  REQUIRE(w.parts().size() == 2);
  CHECK(w.parts()[0] == Interval{1.5, 2.0, true, false});

  const IntervalUnion c = u.complement();
  CHECK(c.contains(-1.0));
  CHECK_FALSE(c.contains(0.0));
  CHECK(c.contains(2.0));
  CHECK(c.contains(2.5));
  CHECK_FALSE(c.contains(3.0));
  CHECK(c.contains(5.5));
  CHECK(c.complement() == u);

  CHECK(IntervalUnion{Interval::open(1.0, 1.0)}.empty());
  CHECK(IntervalUnion{Interval::open(1.0, 2.0), Interval::open(2.0, 3.0)}.parts().size() == 2);
  CHECK(IntervalUnion{Interval::left_open(1.0, 2.0), Interval::open(2.0, 3.0)}.parts().size() == 1);
}

TEST_CASE("semi-distance axioms on random triples") {
  Stream s(2024);
  for (int kind = 0; kind < 6; ++kind) {
    int failures = 0;
    for (int i = 0; i < 10000; ++i) {
      const SemiDistance d = random_kind(s, kind);
      const double a = draw(s, d);
      const double b = draw(s, d);
      const double c = draw(s, d);
      const double tol = 1e-12 * (1.0 + d(a, b) + d(b, c));
      if (d(a, a) != 0.0) ++failures;
      if (d(a, b) != d(b, a)) ++failures;
      if (d(a, c) > d(a, b) + d(b, c) + tol) ++failures;
      if (d(a, b) < 0.0) ++failures;
    }
    INFO("kind " << kind);
    CHECK(failures == 0);
  }
}

TEST_CASE("half-line kinds vanish below the reference point") {
  const std::vector<double> context{1.0, 2.0, 4.0};
  for (const SemiDistance& d :
       {SemiDistance::half_line_absolute(2.0), SemiDistance::half_line_log_ratio(2.0),
        SemiDistance::half_line_studentized(2.0, context)}) {
    CHECK(d(0.5, 1.9) == 0.0);
    CHECK(d(2.0, 1.0) == 0.0);
    CHECK(d(3.0, 1.0) > 0.0);
    CHECK(d(3.0, 1.0) == d(3.0, 2.0));
  }
}

TEST_CASE("closed-form values of each kind") {
  CHECK(SemiDistance::absolute()(1.0, -2.5) == 3.5);
  CHECK_THAT(SemiDistance::log_ratio()(2.0, 8.0), WithinAbs(std::log(4.0), 1e-15));
  const std::vector<double> x{1.0, 2.0, 3.0};  // sigma_bar_prime = 1, n = 3
  CHECK_THAT(SemiDistance::studentized(x)(2.0, 3.0), WithinAbs(std::sqrt(3.0), 1e-14));
  CHECK_THAT(SemiDistance::half_line_absolute(0.0)(2.0, -5.0), WithinAbs(2.0, 0.0));
}

TEST_CASE("studentized kinds refuse a degenerate context") {
  const std::vector<double> flat{2.0, 2.0, 2.0};
  CHECK_THROWS_AS(SemiDistance::studentized(flat), semidist::degenerate_sample);
  CHECK_THROWS_AS(SemiDistance::half_line_studentized(0.0, flat), semidist::degenerate_sample);
  CHECK_THROWS_AS(SemiDistance::studentized(std::vector<double>{1.0}), semidist::invalid_argument);
}

TEST_CASE("log kinds reject points outside (0, inf)") {
  CHECK_THROWS_AS(SemiDistance::log_ratio()(0.0, 1.0), semidist::domain_error);
  CHECK_THROWS_AS(SemiDistance::log_ratio()(-1.0, 1.0), semidist::domain_error);
  CHECK_THROWS_AS(SemiDistance::half_line_log_ratio(0.0), semidist::invalid_argument);
}

TEST_CASE("ball_complement agrees with the semi-distance") {
  Stream s(8);
  for (int kind = 0; kind < 6; ++kind) {
    for (int i = 0; i < 200; ++i) {
      const SemiDistance d = random_kind(s, kind);
      const double center = draw(s, d);
      const double eta = s.uniform() * 3.0;
      const IntervalUnion set = d.ball_complement(center, eta);
      for (int j = 0; j < 50; ++j) {
        const double theta = draw(s, d);
        INFO("kind " << kind << " center " << center << " eta " << eta << " theta " << theta);
        CHECK(set.contains(theta) == (d(theta, center) >= eta));
      }
    }
  }
}

TEST_CASE("Hypothesis membership") {
  CHECK(Hypothesis::point(1.0).contains(1.0));
  CHECK_FALSE(Hypothesis::point(1.0).contains(0.5));
  CHECK(Hypothesis::lower_half_line(1.0).contains(-4.0));
  CHECK_FALSE(Hypothesis::lower_half_line(1.0).contains(1.5));
}
