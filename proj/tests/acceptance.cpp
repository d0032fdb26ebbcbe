// Acceptance suite: one PASS/FAIL line per criterion. All tolerances are pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qlab/complex.hpp"
#include "qlab/tuner.hpp"
#include "qlab/verify.hpp"
#include "qlab/witness_io.hpp"

using namespace qlab;

namespace tol {
constexpr long kIdentityBits = 256;
constexpr long kIdentitySlackBits = 8;            // agreement to 2^-(bits-8)
constexpr double kClosedFormRoot = 1e-25;         // branch endpoints against (20 +- sqrt 316)/42
constexpr double kVHalfWidth = 0.44722;           // V inside [-0.44722, 0.44722]
constexpr long kOracleCells = 1000000;
constexpr double kOracleEndpoint = 1e-6;
constexpr int kOracleDepth = 4;
constexpr long kComplexBits = 128;
constexpr const char* kComplexResidual = "1e-30";
constexpr double kPeriodOneRoot = 1e-15;
constexpr double kBackwardErrorLog2 = -64;        // backward error <= 2^-64
constexpr int kBackwardErrorPeriod = 4;
constexpr double kReturnResidualLog10 = -20;      // |f^{M_n}(x_n) + 1| <= 1e-20
constexpr double kEta = 1.2;
constexpr const char* kA = "200";
constexpr int kCertifiedDepth = 2;
constexpr int kInducedSamples = 1000;
constexpr std::uint64_t kInducedSeed = 1;
constexpr int kChiMaxPeriod = 8;
constexpr double kClosedFormGap = 1e-12;
constexpr int kN0 = 5;                            // least N0 with lambda^-N0 <= lambda^-5
constexpr int kShrinkDelta = 5;                   // delta = lambda^-5
constexpr int kShrinkDepth = 60;
constexpr double kShrinkRateSlack = 0.01;
constexpr int kComplexPeriod = 5;
}  // namespace tol

namespace limit {  // runtime bounds in seconds
constexpr double c1 = 1, c2 = 1, c3 = 30, c4 = 60, c5 = 300, c6 = 1800, c7 = 600, c8 = 600, c9 = 300, c10 = 600;
}

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool in_time = t <= limit_s;
  bool pass = o.pass && in_time;
  if (!pass) failures++;
  std::printf("%s criterion-%d %s: %s [%.2fs / limit %.0fs%s]\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), t,
              limit_s, in_time ? "" : ", too slow");
  std::fflush(stdout);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string first_failure(const std::vector<NamedCheck>& cs) {
  for (const auto& c : cs)
    if (!c.pass) return c.id + " margin " + fmt(c.margin);
  return "";
}

double min_margin(const std::vector<NamedCheck>& cs) {
  double m = INFINITY;
  for (const auto& c : cs) m = std::min(m, c.margin);
  return m;
}

// criterion 6 state, reused by 7 and 8
std::optional<CombinatoricsWitness> certified;

Outcome identities() {
  PrecisionScope scope(tol::kIdentityBits);
  const Real slack = ldexp(Real(1), -(tol::kIdentityBits - tol::kIdentitySlackBits));
  int bad = 0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      std::string a = std::to_string(20 + 37 * i) + "." + std::to_string(j);
      std::string tau = "0." + std::to_string(j) + "3";
      if (j % 2) tau = "1." + std::to_string(j) + "7";
      QuarticMap f(a, tau);
      Real ra(a), rt(tau);
      Real lam = 2 * (ra + 4 - 2 * rt);
      Real v = 1 - rt + ra * ra / (4 * (ra + 2 - rt));
      bool ok = abs(f.eval(Real(1)) + 1) <= slack && abs(f.eval(Real(-1)) + 1) <= slack &&
                abs(f.deriv(Real(-1)) - lam) <= slack * lam && abs(f.critical_value() - v) <= slack * v &&
                abs(f.eval(f.c_plus()) - v) <= slack * v;
      if (!ok) bad++;
    }
  return {bad == 0, "100 (a, tau) pairs, " + std::to_string(bad) + " mismatches"};
}

Outcome branches() {
  PrecisionScope scope(256);
  QuarticMap f("20", "1");
  auto r = preimage_components(f, Enclosure(Real(-1), Real(1)), 1, default_range(f));
  if (r.components.size() != 3) return {false, std::to_string(r.components.size()) + " components"};
  Real s = sqrt(Real(316));
  Real outer = sqrt((20 + s) / 42), inner = sqrt((20 - s) / 42);
  const Real t(tol::kClosedFormRoot);
  const auto& c = r.components;
  bool ends = abs(c[0].interval.lo + 1) <= t && abs(c[0].interval.hi + outer) <= t &&
              abs(c[1].interval.lo + inner) <= t && abs(c[1].interval.hi - inner) <= t &&
              abs(c[2].interval.lo - outer) <= t && abs(c[2].interval.hi - 1) <= t;
  const Real hw(tol::kVHalfWidth);
  bool v_in = c[1].interval.lo >= -hw && c[1].interval.hi <= hw;
  return {ends && v_in, "3 components, V = " + c[1].interval.str(8)};
}

Outcome oracle_equivalence() {
  PrecisionScope scope(256);
  QuarticMap f("20", "1");
  Enclosure range(Real(-2), Real(2));
  oracle::Quartic q{20, 1};
  long double worst = 0;
  const Enclosure Js[2] = {Enclosure(Real(-1), Real(1)), Enclosure(Real("-1.01"), Real(-1))};
  for (const Enclosure& J : Js) {
    for (int n = 1; n <= tol::kOracleDepth; ++n) {
      auto got = preimage_components(f, J, n, range);
      auto want = oracle::pullback_components(q, J.lo.to_long_double(), J.hi.to_long_double(), n, -2, 2,
                                              tol::kOracleCells);
      if (got.components.size() != want.size())
        return {false, "count mismatch at n=" + std::to_string(n) + " J = " + J.str(6)};
      for (std::size_t i = 0; i < want.size(); ++i) {
        worst = std::max(worst, std::fabs(got.components[i].interval.lo.to_long_double() - want[i].lo));
        worst = std::max(worst, std::fabs(got.components[i].interval.hi.to_long_double() - want[i].hi));
      }
    }
  }
  return {worst <= tol::kOracleEndpoint, "counts equal, worst endpoint gap " + fmt(static_cast<double>(worst))};
}

Outcome complex_roots_check() {
  bool ok = true;
  std::string d;
  {
    PrecisionScope scope(tol::kComplexBits);
    QuarticMap f("20", "1");
    auto roots = complex_roots(f, Complex(Real(-1)));
    Real s = 1 / sqrt(Real(21));
    const Complex expect[4] = {Complex(Real(-1)), Complex(Real(0), -s), Complex(Real(0), s), Complex(Real(1))};
    ok = roots.size() == 4;
    for (std::size_t i = 0; ok && i < 4; ++i)
      ok = abs(roots[i].z - expect[i]) <= Real(tol::kComplexResidual) && roots[i].residual <= Real(tol::kComplexResidual);
    d += ok ? "preimages of -1 ok" : "preimages of -1 wrong";
  }
  PrecisionScope scope(256);
  QuarticMap f("20", "1");
  auto spec = complex_periodic_spectrum(f, tol::kBackwardErrorPeriod);
  const auto& p1 = spec.by_period.at(1);
  const double expect[4] = {-1, 0, (21 - std::sqrt(357.0)) / 42, (21 + std::sqrt(357.0)) / 42};
  bool p1ok = p1.size() == 4;
  for (std::size_t i = 0; p1ok && i < 4; ++i)
    p1ok = std::fabs(p1[i].root.z.re.to_double() - expect[i]) < tol::kPeriodOneRoot &&
           abs(p1[i].root.z.im) < Real(tol::kComplexResidual);
  double worst = -INFINITY;
  for (auto [n, be] : spec.backward_error) worst = std::max(worst, std::log2(be));
  bool beok = worst <= tol::kBackwardErrorLog2;
  d += std::string(", period-1 ") + (p1ok ? "ok" : "wrong") + ", log2 backward error " + fmt(worst);
  return {ok && p1ok && beok, d};
}

Outcome tuner_small() {
  ReturnTimeSequence seq{{2, 5, 11, 23}, 1.5, 20, false};
  auto r1 = tune_tau("20", seq, 2);
  auto r2 = tune_tau("20", seq, 2);
  std::string text = format_witness(r1.witness);
  bool same = text == format_witness(r2.witness);
  auto L = parse_witness(text);  // independent check_type_M at the stored precision
  const auto& w = L.witness;
  bool flags = w.passes() && L.flags_reproduced;
  double worst = -INFINITY;
  for (const auto& lv : w.levels) worst = std::max(worst, lv.log10_residual_return);
  return {same && flags && worst <= tol::kReturnResidualLog10,
          std::string("A/B ") + (flags ? "pass" : "fail") + " at levels 0-2, log10 residual " + fmt(worst) +
              (same ? ", reruns identical" : ", reruns differ")};
}

Outcome certified_suite() {
  auto seq = generate_M(tol::kEta, std::stod(tol::kA), tol::kCertifiedDepth + 1);
  auto r = tune_tau(tol::kA, seq, tol::kCertifiedDepth);
  if (!r.witness.passes()) return {false, "tuned witness fails properties A/B"};
  certified = r.witness;
  const auto& w = *certified;
  std::vector<NamedCheck> checks;
  {
    PrecisionScope scope(256);
    QuarticMap f(w.a_text, w.tau_text);
    auto m = verify_macro(f, tol::kEta);
    checks.insert(checks.end(), m.begin(), m.end());
  }
  auto cr = verify_close_return(w);
  auto lb = verify_long_branch(w);
  auto ce = verify_collet_eckmann(w);
  checks.insert(checks.end(), cr.begin(), cr.end());
  checks.insert(checks.end(), lb.begin(), lb.end());
  checks.insert(checks.end(), ce.begin(), ce.end());
  std::ostringstream d;
  d << "a=" << tol::kA << " eta=" << tol::kEta << " M=" << detail::join_longs(w.M) << ", " << checks.size()
    << " checks, min margin " << fmt(min_margin(checks));
  if (!all_pass(checks)) d << ", first failure " << first_failure(checks);
  return {all_pass(checks), d.str()};
}

Outcome induced() {
  if (!certified) return {false, "needs the criterion-6 witness"};
  const auto& w = *certified;
  auto r = verify_induced_expansion(w, tol::kInducedSamples, tol::kInducedSeed);
  PrecisionScope scope(256);
  QuarticMap f(w.a_text, w.tau_text);
  auto s = chi_per_empirical(f, tol::kChiMaxPeriod, tol::kEta);
  bool chi = s.chi_per_empirical >= s.chi_lower;
  bool ok = all_pass(r.checks) && r.sampled == tol::kInducedSamples && chi;
  std::ostringstream d;
  d << r.sampled << " points of K, min margin " << fmt(min_margin(r.checks)) << ", chi_per(8) "
    << fmt(s.chi_per_empirical) << " >= " << fmt(s.chi_lower);
  return {ok, d.str()};
}

Outcome gap() {
  if (!certified) return {false, "needs the criterion-6 witness"};
  const auto& w = *certified;
  int N0;
  {
    PrecisionScope scope(256);
    QuarticMap f(w.a_text, w.tau_text);
    N0 = n0_for_delta(f, std::pow(f.lambda().to_double(), -tol::kShrinkDelta));
  }
  if (N0 != tol::kN0) return {false, "N0 = " + std::to_string(N0)};
  auto g = verify_main_gap(w, N0, {0, 1});
  // independent evaluation in long double from the decimal tau
  long double tau = std::stold(w.tau_text), a = std::stold(w.a_text), eta = tol::kEta;
  long double lam = 2 * (a + 4 - 2 * tau);
  double rate = static_cast<double>(0.375L * std::log(eta * lam));
  double chi = static_cast<double>(0.5L * std::log(lam) - 2 * std::log(eta));
  bool forms = std::fabs(g.rate_bound - rate) <= tol::kClosedFormGap && std::fabs(g.chi_lower - chi) <= tol::kClosedFormGap;
  bool gate = lam > std::pow(eta, 19.0L);
  bool wn = true;
  std::ostringstream d;
  for (const auto& m : g.wn) {
    bool ok = all_pass(m.checks) && m.log_len >= m.log_bound;
    if (m.in_hypothesis) wn = wn && ok;
    d << " W_" << m.n << (m.in_hypothesis ? "" : " (outside hypothesis)") << " ln|W| " << fmt(m.log_len) << " >= "
      << fmt(m.log_bound) << (ok ? " ok" : " FAIL") << ";";
  }
  bool ok = forms && gate && g.gate && g.rate_bound < g.chi_lower && g.verdict && wn;
  return {ok, "gate lambda=" + fmt(g.lambda) + " > eta^19, rate_bound " + fmt(g.rate_bound) + " < chi_lower " +
                  fmt(g.chi_lower) + (forms ? " (closed forms agree)" : " (closed forms differ)") + ";" + d.str()};
}

Outcome shrink() {
  if (!certified) return {false, "needs the criterion-6 witness"};
  const auto& w = *certified;
  long bits = detail::bits_for_depth(detail::map_at(w, 256), tol::kShrinkDepth, w.bits);
  PrecisionScope scope(bits);
  QuarticMap f(w.a_text, w.tau_text);
  auto p = shrink_probe(f, pow(f.lambda(), Real(-tol::kShrinkDelta)), tol::kShrinkDepth);
  double floor = -std::log(f.lambda().to_double()) - tol::kShrinkRateSlack;
  bool ok = p.fitted_rho > 1 && p.min_normalized_rate >= floor && static_cast<int>(p.series.samples.size()) == tol::kShrinkDepth;
  return {ok, "rho " + fmt(p.fitted_rho) + ", min rate " + fmt(p.min_normalized_rate) + " >= " + fmt(floor) +
                  (p.series.truncated ? " (beam-truncated series)" : "")};
}

Outcome real_vs_complex() {
  std::vector<std::pair<std::string, std::string>> params = {{"20", "1"}};
  if (certified) params.push_back({certified->a_text, certified->tau_text});
  bool ok = certified.has_value();
  std::ostringstream d;
  for (const auto& [a, tau] : params) {
    PrecisionScope scope(256);
    QuarticMap f(a, tau);
    auto cs = complex_periodic_spectrum(f, tol::kComplexPeriod);
    auto rs = summarize_spectrum(enumerate_periodic(f, tol::kComplexPeriod), tol::kComplexPeriod, 0);
    bool le = cs.chi_per_complex <= rs.chi_per_empirical;
    ok = ok && le;
    d << "a=" << a << ": chi_C " << fmt(cs.chi_per_complex) << " <= chi_R " << fmt(rs.chi_per_empirical)
      << (cs.chi_per_complex < rs.chi_per_empirical ? " (strict, empirical evidence)" : "") << "; ";
  }
  if (!certified) d << "tuned parameters missing";
  return {ok, d.str()};
}

}  // namespace

int main() {
  run(1, "exact-identities", limit::c1, identities);
  run(2, "branch-structure", limit::c2, branches);
  run(3, "pullback-oracle", limit::c3, oracle_equivalence);
  run(4, "complex-roots", limit::c4, complex_roots_check);
  run(5, "tuner-small-M", limit::c5, tuner_small);
  run(6, "certified-inequalities", limit::c6, certified_suite);
  run(7, "induced-expansion", limit::c7, induced);
  run(8, "rate-gap", limit::c8, gap);
  run(9, "shrink-probe", limit::c9, shrink);
  run(10, "real-vs-complex", limit::c10, real_vs_complex);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
