#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "qlab/spectrum.hpp"
#include "qlab/tuner.hpp"

using namespace qlab;

TEST_CASE("period-1 points of the factorable map") {
  PrecisionScope scope(256);
  QuarticMap f("20", "1");
  auto recs = enumerate_periodic(f, 1);
  REQUIRE(recs.size() == 4);
  const double expect[4] = {-1, 0, (21 - std::sqrt(357.0)) / 42, (21 + std::sqrt(357.0)) / 42};
  for (int i = 0; i < 4; ++i) CHECK(std::fabs(recs[i].point.mid().to_double() - expect[i]) < 1e-15);
  CHECK(abs(recs[0].log_multiplier - log(Real(44))) < ldexp(Real(1), -240));
  CHECK(recs[0].repelling);
  CHECK(!recs[1].repelling);
  CHECK(recs[2].repelling);
  CHECK(recs[3].repelling);
}

TEST_CASE("enumeration matches a sign-scan oracle") {
  PrecisionScope scope(256);
  for (const char* tau : {"1", "0.3"}) {
    QuarticMap f("20", tau);
    oracle::Quartic q{20, std::stold(tau)};
    auto recs = enumerate_periodic(f, 3);
    for (int n = 1; n <= 3; ++n) {
      auto roots = oracle::periodic_points(q, n, -1, 1);
      std::vector<double> mine;
      for (const auto& r : recs)
        if (n % r.period == 0) mine.push_back(r.point.mid().to_double());
      std::sort(mine.begin(), mine.end());
      INFO("tau " << tau << " period " << n);
      REQUIRE(mine.size() == roots.size());
      for (std::size_t i = 0; i < roots.size(); ++i) CHECK(std::fabs(mine[i] - double(roots[i])) < 1e-9);
    }
    for (const auto& r : recs) {
      CHECK(abs(detail::iterate_minus(f, r.point.mid(), r.period)) < Real("1e-60"));
      if (r.period == 2) CHECK(abs(detail::iterate_minus(f, r.point.mid(), 1)) > Real("1e-30"));
    }
  }
}

TEST_CASE("summary aggregates a running minimum") {
  PrecisionScope scope(256);
  QuarticMap f("20", "1");
  auto s = chi_per_empirical(f, 4, 1.5);
  CHECK(s.non_repelling >= 1);
  CHECK(s.count_by_period[1] == 4);
  for (int p = 1; p < 4; ++p) CHECK(s.running_min[p] <= s.running_min[p - 1]);
  CHECK(s.chi_per_empirical == s.running_min.back());
  CHECK(std::fabs(s.chi_lower - (0.5 * std::log(44.0) - 2 * std::log(1.5))) < 1e-12);

  // beyond the range only -1 survives as a cycle of [-1, 1]
  QuarticMap g("20", "0");
  auto recs = enumerate_periodic(g, 1);
  REQUIRE(!recs.empty());
  CHECK(recs[0].point.mid() == -1);
}

TEST_CASE("critical-orbit series and induced step on a tuned map") {
  auto seq = ReturnTimeSequence{{2, 5, 11, 23}, 1.5, 20, false};
  TuneResult r = tune_tau("20", seq, 1);
  REQUIRE(r.witness.passes());
  PrecisionScope scope(r.witness.bits);
  QuarticMap f("20", r.witness.tau_text);
  auto ce = ce_series(f, 2 * 5);
  REQUIRE(ce.size() == 10);
  double lnl = std::log(f.lambda().to_double());
  CHECK(std::fabs(ce[0].log_deriv - lnl) < std::log(1.5));
  // close return: f^{M_n}(0) near 0 makes the derivative collapse
  CHECK(ce[4].log_deriv < ce[3].log_deriv);

  QuarticMap esc("20", "0.5");
  CHECK_THROWS_AS(ce_series(esc, 30), Error);

  const auto& w = r.witness;
  CHECK_THROWS_AS(induced_step(f, w, Real(0)), Error);
  auto far = induced_step(f, w, Real("-0.99"));
  CHECK(far.m == 1);
  CHECK(far.level == -1);
  Real inside0 = (w.x_seq[0].mid() + w.x_seq[1].mid()) / 2;
  auto s0 = induced_step(f, w, inside0);
  CHECK(s0.m == 2);
  CHECK(s0.level == 0);
  Real inside1 = (w.x_seq[1].mid() + w.x_seq[2].mid()) / 2;
  CHECK(induced_step(f, w, inside1).m == 5);
  try {
    induced_step(f, w, w.x_seq[2].mid() / 2);
    FAIL("expected DepthExceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DepthExceeded);
  }
}

TEST_CASE("invariant-set samples are forward invariant and reach deep levels") {
  auto seq = ReturnTimeSequence{{2, 5, 11, 23}, 1.5, 20, false};
  TuneResult r = tune_tau("20", seq, 1);
  REQUIRE(r.witness.passes());
  const auto& w = r.witness;
  PrecisionScope scope(w.bits);
  QuarticMap f("20", w.tau_text);

  auto pts = sample_invariant_set(f, 200, 7);
  REQUIRE(pts.size() == 200);
  auto again = sample_invariant_set(f, 200, 7);
  CHECK(again[17] == pts[17]);
  for (const auto& x : pts) {
    // a K point stays in [-1, 1] along its chain; rounding grows by at most lambda per step
    Real y = x, tmp;
    bool inside = true;
    for (int k = 0; k < 24 && inside; ++k) {
      inside = abs(y) <= Real(1) + ldexp(Real(1), -64);
      f.step(y, tmp);
    }
    CHECK(inside);
  }
  for (const auto& x : sample_invariant_set(f, 50, 3, 16, true)) CHECK(x < w.x_seq[0].mid());

  auto near = sample_invariant_set_near_cutting_point(f, w, 1, 40, 5);
  REQUIRE(!near.empty());
  for (const auto& x : near) {
    auto st = induced_step(f, w, x);
    CHECK(st.level >= 0);
  }
}
