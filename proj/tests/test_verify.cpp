#include <catch_amalgamated.hpp>

#include <cmath>

#include "qlab/tuner.hpp"
#include "qlab/verify.hpp"

using namespace qlab;

namespace {
const CombinatoricsWitness& witness_a20() {
  static const CombinatoricsWitness w = [] {
    auto seq = ReturnTimeSequence{{2, 5, 11, 23}, 1.5, 20, false};
    return tune_tau("20", seq, 1).witness;
  }();
  return w;
}

const NamedCheck* find(const std::vector<NamedCheck>& cs, const std::string& prefix) {
  for (const auto& c : cs)
    if (c.id.rfind(prefix, 0) == 0) return &c;
  return nullptr;
}
}  // namespace

TEST_CASE("log checks record margins in log space") {
  auto c = log_check("x", std::log(2.0), "<=", std::log(3.0));
  CHECK(c.pass);
  CHECK(c.margin == Catch::Approx(std::log(1.5)));
  auto d = log_check("y", 1.0, ">=", 2.0);
  CHECK(!d.pass);
  CHECK(d.margin < 0);
  PrecisionScope scope(256);
  auto r = ratio_check("z", Real(5), "<=", Real(5) + ldexp(Real(1), -100));
  CHECK(r.pass);
  CHECK(r.margin > 0);
}

TEST_CASE("macro checks on the factorable map") {
  PrecisionScope scope(256);
  QuarticMap f("20", "1");
  auto cs = verify_macro(f, 1.5, 17, 3);
  for (const char* id : {"macro-inclusion-I0", "macro-inclusion-V", "macro-inclusion-I1", "macro-inclusion-I1-upper"}) {
    auto* c = find(cs, id);
    REQUIRE(c);
    CHECK(c->pass);
  }
  auto* dist = find(cs, "macro-distortion");
  REQUIRE(dist);
  CHECK(dist->lhs > 0);
  // an eta just above 1 cannot bound a nontrivial distortion
  auto tight = verify_macro(f, 1.0 + 1e-9, 17, 3);
  CHECK(!find(tight, "macro-distortion")->pass);

  QuarticMap small("10", "1");
  CHECK_THROWS_AS(verify_macro(small, 1.5), Error);
}

TEST_CASE("close-return and long-branch checks on a tuned map") {
  const auto& w = witness_a20();
  REQUIRE(w.passes());
  auto cr = verify_close_return(w, 9);
  REQUIRE(!cr.empty());
  for (const auto& c : cr) {
    INFO(c.id << " lhs " << c.lhs << " rhs " << c.rhs);
    CHECK(std::isfinite(c.lhs));
  }
  CHECK(find(cr, "cutting-point"));
  auto lb = verify_long_branch(w, 9);
  REQUIRE(!lb.empty());
  auto* order = find(lb, "gap-point-order");
  REQUIRE(order);
  CHECK(order->pass);
}

TEST_CASE("N0 from delta") {
  PrecisionScope scope(256);
  QuarticMap f("200", "0.5");
  double lambda = f.lambda().to_double();
  CHECK(n0_for_delta(f, std::pow(lambda, -5)) == 5);
  CHECK(n0_for_delta(f, std::pow(lambda, -5) * 0.99) == 6);
  CHECK(n0_for_delta(f, 1.0) == 0);
  CHECK_THROWS_AS(n0_for_delta(f, 0.0), Error);
}

TEST_CASE("gap report closed forms and depth requirements") {
  const auto& w = witness_a20();
  try {
    measure_wn(w, 0, 5);
    FAIL("expected DepthInsufficient");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DepthInsufficient);
  }
  auto g = verify_main_gap(w, 5, {}, 4);
  double tau = std::stod(w.tau_text);
  double lambda = 2 * (20 + 4 - 2 * tau);
  CHECK(std::fabs(g.lambda - lambda) < 1e-12 * lambda);
  CHECK(std::fabs(g.rate_bound - 0.375 * std::log(1.5 * lambda)) < 1e-12);
  CHECK(std::fabs(g.chi_lower - (0.5 * std::log(lambda) - 2 * std::log(1.5))) < 1e-12);
  CHECK(g.gate == (lambda > std::pow(1.5, 19)));
  CHECK(!g.gate);
  CHECK(!g.verdict);
}

TEST_CASE("shrink probe contracts") {
  PrecisionScope scope(256);
  QuarticMap f("20", "1");
  Real delta = pow(f.lambda(), Real(-2));
  auto p = shrink_probe(f, delta, 12);
  REQUIRE(p.series.samples.size() == 12);
  CHECK(p.fitted_rho > 1);
  CHECK(p.min_normalized_rate >= -std::log(f.lambda().to_double()) - 1e-9);
  CHECK_THROWS_AS(shrink_probe(f, Real(0), 5), Error);
}

TEST_CASE("exactness probe") {
  PrecisionScope scope(256);
  QuarticMap f("20", "1");
  CHECK(exactness_probe(f, Enclosure(Real(-1), Real(1)), 5) == 0);
  int k = exactness_probe(f, Enclosure(Real(-1), Real("-0.99")), 40);
  CHECK(k >= 1);
  CHECK(k <= 40);
  BranchPartition P = branch_partition(f);
  CHECK_THROWS_AS(exactness_probe(f, Enclosure(P.G_left.mid(), P.G_left.mid()), 5), Error);
  CHECK_THROWS_AS(exactness_probe(f, Enclosure(Real(2), Real(3)), 5), Error);
}

TEST_CASE("critical-orbit and induced-expansion checks report one worst case each") {
  const auto& w = witness_a20();
  auto ce = verify_collet_eckmann(w);
  REQUIRE(ce.size() == 1);
  CHECK(ce[0].id.rfind("collet-eckmann-lower-m", 0) == 0);
  CHECK(std::isfinite(ce[0].lhs));
  CHECK_THROWS_AS(verify_collet_eckmann(w, w.M[w.depth + 1]), Error);

  auto r = verify_induced_expansion(w, 200, 3);
  CHECK(r.sampled + r.dropped >= 180);
  CHECK(r.by_level.count(-1) == 1);
  CHECK(r.by_level.count(1) == 1);
  CHECK(r.checks.size() == r.by_level.size());
  for (const auto& c : r.checks) CHECK(std::isfinite(c.margin));
  CHECK_THROWS_AS(verify_induced_expansion(w, 5, 3), Error);
}
