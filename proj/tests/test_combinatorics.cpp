#include <catch_amalgamated.hpp>

#include "qlab/tuner.hpp"

using namespace qlab;

TEST_CASE("generate_M growth rule") {
  auto s = generate_M(1.5, 129, 3);
  REQUIRE(s.M.size() == 4);
  CHECK(s.M[0] == 2);
  CHECK(s.M[1] == 23);
  CHECK(s.certified);
  for (std::size_t n = 0; n + 1 < s.M.size(); ++n) {
    double m = s.M[n], m1 = s.M[n + 1];
    CHECK(2 * m1 >= 5 * m);
    CHECK(m1 - 2 * m >= m / 2);
    CHECK(m / 2 >= std::pow(2.0, n));
    // least integer with the inequality
    double rhs = std::log(4.0) + 2.5 * m * std::log(1.5) + 0.5 * m * std::log(2 * 129.0 + 8);
    CHECK(m1 * std::log(1.5) >= rhs);
    CHECK((m1 - 1) * std::log(1.5) < rhs);
  }
  CHECK(std::pow(1.5, 23) >= 4 * std::pow(1.5, 5) * 266);
  CHECK(std::pow(1.5, 22) < 4 * std::pow(1.5, 5) * 266);
  CHECK_THROWS_AS(generate_M(2.5, 129, 2), Error);
  CHECK(admissible({2, 5, 11, 23}));
  CHECK(!admissible({2, 4, 11}));
}

TEST_CASE("precision schedule") {
  CHECK(precision_for_return_time("20", 2) == 256);
  long b = precision_for_return_time("200", 16734);
  CHECK(b == static_cast<long>(std::ceil(1.2 * 16734 * std::log2(408.0))) + 64);
}

TEST_CASE("u-coordinate inverse near the fixed point") {
  PrecisionScope scope(256);
  QuarticMap f("20", "0.3");
  Real s("1e-40");
  Real u = inverse_near_fixed_point(f, s);
  Real h = u * (2 - u) * (f.b() * sqr(1 - u) + 2 - f.tau());
  CHECK(abs(h - s) < s * Real("1e-70"));
  CHECK(abs(inverse_near_fixed_point(f, Real(2)) - (1 + branch_partition(f).I0.hi)) < Real("1e-70"));
  Real rho = fixed_point_shadow(f, 5);
  CHECK(abs(f.iterate(rho - 1, 5) - 1) < Real("1e-60"));
}

TEST_CASE("depth-0 check at a boundary parameter") {
  PrecisionScope scope(256);
  // tau = 0: f(0) = 1, f^2(0) = -1, V degenerates to {0}
  QuarticMap f("20", "0");
  CHECK(f.iterate(Real(0), 2) == -1);
}

TEST_CASE("cutting point x_0 is the left end of V") {
  PrecisionScope scope(256);
  QuarticMap f("20", "1");
  auto s = scan_critical_orbit(f, 4);
  auto xs = cutting_points(f, {2, 5}, 0, s.branches);
  REQUIRE(xs);
  CHECK(std::fabs(xs->front().to_double() + 0.2300937) < 1e-6);
}

TEST_CASE("tune_tau depth 0 and depth 1 with nesting") {
  auto seq = ReturnTimeSequence{{2, 5, 11}, 0, 0, false};
  TuneResult r0 = tune_tau("20", seq, 0);
  REQUIRE(r0.tau_levels.size() == 2);
  const CombinatoricsWitness& w0 = r0.witness;
  CHECK(w0.passes());
  {
    PrecisionScope scope(256);
    // f^2(0) in [-1, 1] at both ends of the enclosure
    for (const Real* t : {&r0.tau_levels[0].lo, &r0.tau_levels[0].hi}) {
      Real v = QuarticMap("20", t->str()).iterate(Real(0), 2);
      CHECK(v >= Real("-1.000000000000000000000000000001"));
      CHECK(v <= Real("1.000000000000000000000000000001"));
    }
  }
  TuneResult r1 = tune_tau("20", seq, 1);
  CHECK(r1.witness.passes());
  REQUIRE(r1.tau_levels.size() == 3);
  for (int n = 0; n < 2; ++n) {
    CHECK(r1.tau_levels[n].lo == r0.tau_levels[n].lo);
    CHECK(r1.tau_levels[n].hi == r0.tau_levels[n].hi);
  }
  CHECK(r1.tau_levels[0].contains(r1.tau_levels[1]));
  CHECK(r1.tau_levels[1].contains(r1.tau_levels[2]));
}

TEST_CASE("check_type_M rejects an untuned parameter") {
  PrecisionScope scope(256);
  QuarticMap f("20", "1");
  auto w = check_type_M(f, ReturnTimeSequence{{2, 5, 11}, 0, 0, false}, 1);
  CHECK(!w.passes());
}
