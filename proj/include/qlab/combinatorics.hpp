#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qlab/pullback.hpp"

namespace qlab {

struct ReturnTimeSequence {
  std::vector<long> M;
  double eta = 0;
  double a = 0;
  bool certified = false;
};

/// M[n+1] >= 2 M[n] + 1 and M[0] = 2.
inline bool admissible(const std::vector<long>& M) {
  if (M.empty() || M[0] != 2) return false;
  for (std::size_t n = 0; n + 1 < M.size(); ++n)
    if (M[n + 1] < 2 * M[n] + 1) return false;
  return true;
}

/// Least M[n+1] with eta^{M[n+1]} >= 4 eta^{5 M[n]/2} (2a+8)^{M[n]/2}; returns M[0..depth].
inline ReturnTimeSequence generate_M(double eta, double a, int depth) {
  require(eta > 1 && eta < 2, ErrorKind::Precondition, "eta must lie in (1, 2)");
  require(a >= 20, ErrorKind::Precondition, "a must be at least 20");
  require(depth >= 0, ErrorKind::Precondition, "negative depth");
  ReturnTimeSequence out;
  out.eta = eta;
  out.a = a;
  out.certified = true;
  out.M.push_back(2);
  const long double le = std::log(static_cast<long double>(eta));
  const long double l2a = std::log(2.0L * a + 8.0L);
  for (int n = 0; n < depth; ++n) {
    long double m = static_cast<long double>(out.M.back());
    long double rhs = std::log(4.0L) + 2.5L * m * le + 0.5L * m * l2a;
    long next = static_cast<long>(std::ceil(rhs / le - 1e-12L));
    while (static_cast<long double>(next) * le < rhs) ++next;
    while (next > 0 && static_cast<long double>(next - 1) * le >= rhs) --next;
    next = std::max(next, 2 * out.M.back() + 1);
    out.M.push_back(next);
  }
  return out;
}

/// log2 of 2(a+4), the largest multiplier at -1 over tau in [0, 2].
inline double log2_lambda_max(const std::string& a_text) {
  return std::log2(2.0 * (std::stod(a_text) + 4.0));
}

/// max(256, ceil(1.2 * m * log2(lambda_max)) + 64).
inline long precision_for_return_time(const std::string& a_text, long m) {
  double b = std::ceil(1.2 * static_cast<double>(m) * log2_lambda_max(a_text)) + 64;
  return std::max<long>(256, static_cast<long>(b));
}

/// lambda_max^{-m} * 1e-5, the default tau resolution at return time m.
inline Real tau_target_width(const std::string& a_text, long m) {
  Real l = 2 * (Real(a_text) + 4);
  return pow(l, -m) / 100000;
}

/// Forward orbit of 0: branch word b_0 .. b_{n-1} and the points at the requested times.
struct CriticalOrbitScan {
  std::vector<signed char> branches;
  std::vector<Real> points;  // f^k(0) for k < keep (may be empty)
  Real last;                 // f^n(0)
};

inline CriticalOrbitScan scan_critical_orbit(const QuarticMap& map, long n, long keep = 0) {
  CriticalOrbitScan s;
  s.branches.reserve(n);
  Real x(0);
  Real tmp;
  for (long k = 0; k < n; ++k) {
    if (k < keep) s.points.push_back(x);
    s.branches.push_back(static_cast<signed char>(branch_of(map, x)));
    map.step(x, tmp);
  }
  s.last = std::move(x);
  return s;
}

/// Inverse chain: the point z with f^m(z) = x whose orbit follows branch 1 then b_1 .. b_{m-1}.
inline std::optional<Real> chain_preimage(const QuarticMap& map, const Real& x, long m,
                                          const std::vector<signed char>& branches) {
  require(static_cast<long>(branches.size()) >= m, ErrorKind::Precondition, "branch word too short");
  Real z = x;
  for (long k = m - 1; k >= 1; --k) {
    auto p = inverse_branch(map, branches[k], z);
    if (!p) return std::nullopt;
    z = std::move(*p);
  }
  auto p = inverse_branch(map, 1, z);
  if (!p) return std::nullopt;
  return p;
}

/// x_0 .. x_upto: x_0 the left end of V, x_{k+1} the chain preimage of x_k along f^{M_k}.
inline std::optional<std::vector<Real>> cutting_points(const QuarticMap& map, const std::vector<long>& M, int upto,
                                                       const std::vector<signed char>& branches) {
  std::vector<Real> xs;
  xs.push_back(branch_partition(map).V.lo);
  for (int k = 0; k < upto; ++k) {
    auto z = chain_preimage(map, xs.back(), M[k], branches);
    if (!z) return std::nullopt;
    xs.push_back(std::move(*z));
  }
  return xs;
}

/// Near -1 in u = x + 1: h(u) = f(-1 + u) + 1 = u (2 - u) (b (1 - u)^2 + 2 - tau).
/// Inverse on the branch through -1, written without cancellation for small s.
inline Real inverse_near_fixed_point(const QuarticMap& map, const Real& s) {
  Real w = s - 1;
  Real disc = map.a() * map.a() - 4 * map.b() * (w - map.c0());
  Real t = 2 * s / (2 * map.b() - map.a() + sqrt(disc));  // 1 - y
  Real y = 1 - t;
  return t / (1 + sqrt(y));
}

/// rho = 1 + g_0^K(1): the left component of f^{-K}([-1, 1]) is [-1, -1 + rho].
inline Real fixed_point_shadow(const QuarticMap& map, long K) {
  Real u(2);
  for (long k = 0; k < K; ++k) u = inverse_near_fixed_point(map, u);
  return u;
}

struct LevelReport {
  bool A = false;
  bool B = false;
  std::vector<std::string> failures;
  double log10_residual_return = 0;  // log10 |f^{M_n}(x_n) + 1|
  double log10_residual_chain = 0;   // log10 |f^{M_n}(x_{n+1}) - x_n|
};

struct CombinatoricsWitness {
  std::string a_text;
  std::string tau_text;
  double eta = 0;
  std::vector<long> M;
  int depth = 0;
  long bits = 0;
  Enclosure tau;
  std::vector<Enclosure> tau_levels;  // T_0 .. T_{depth+1} when produced by the tuner
  std::vector<Enclosure> x_seq;       // x_0 .. x_{depth+1}
  std::vector<Enclosure> J_seq;       // J_0 .. J_depth
  std::vector<Enclosure> U_seq;       // U_0 .. U_{depth+1}
  std::vector<Enclosure> y_seq;       // y_0 .. y_{depth+1}
  std::vector<std::vector<int>> J_itineraries;
  std::vector<bool> flags_A, flags_B;
  std::vector<LevelReport> levels;
  bool ordering_ok = false;  // y_n < x_n < y_{n+1} < 0
  std::vector<signed char> critical_word;  // branches of f^k(0), k < M[depth+1]

  bool passes() const {
    for (std::size_t n = 0; n < flags_A.size(); ++n)
      if (!flags_A[n] || !flags_B[n]) return false;
    return !flags_A.empty() && ordering_ok;
  }
};

namespace detail {
inline double log10_abs(const Real& x) { return x.is_zero() ? -INFINITY : x.log_abs() / std::log(10.0); }

/// Residual allowance for an identity holding after m steps at the working precision.
inline Real residual_tolerance(const QuarticMap& map, long m) {
  double lg = static_cast<double>(m) * std::log2(2 * (map.a().to_double() + 4)) - working_bits() + 48;
  return ldexp(Real(1), static_cast<long>(std::min(std::ceil(lg), -67.0)));
}
}  // namespace detail

/// Type-M combinatorics check at the map's precision: Properties A and B at levels 0..depth,
/// plus the U_n / y_n sequence. Needs M[0..depth+1].
inline CombinatoricsWitness check_type_M(const QuarticMap& map, const ReturnTimeSequence& seq, int depth) {
  const auto& M = seq.M;
  require(depth >= 0, ErrorKind::Precondition, "negative depth");
  require(static_cast<int>(M.size()) >= depth + 2, ErrorKind::DepthInsufficient,
          "return-time list needs entries up to M[depth+1]");
  require(admissible(M), ErrorKind::Precondition, "M is not admissible");
  PrecisionScope scope(map.bits());

  CombinatoricsWitness w;
  w.a_text = map.a_text();
  w.tau_text = map.tau_text();
  w.eta = seq.eta;
  w.M = M;
  w.depth = depth;
  w.bits = map.bits();
  w.tau = Enclosure::point(map.tau());

  BranchPartition P = branch_partition(map);
  const long horizon = M[depth + 1];

  // one pass over the critical orbit: branch word, points up to M[depth], Property B bookkeeping
  std::vector<Real> early;
  std::vector<Real> at_return(depth + 2), at_double(depth + 1);
  std::vector<long> first_B_failure(depth + 1, -1);
  w.critical_word.reserve(horizon);
  {
    Real x(0), tmp;
    for (long k = 0; k <= horizon; ++k) {
      if (k < M[depth]) early.push_back(x);
      for (int n = 0; n <= depth + 1; ++n)
        if (k == M[n]) at_return[n] = x;
      for (int n = 0; n <= depth; ++n) {
        if (k == 2 * M[n]) at_double[n] = x;
        if (k >= 2 * M[n] && k < M[n + 1] && first_B_failure[n] < 0 && !P.I0.contains(x))
          first_B_failure[n] = k;
      }
      if (k == horizon) break;
      w.critical_word.push_back(static_cast<signed char>(branch_of(map, x)));
      map.step(x, tmp);
    }
  }

  // cutting points, J_n, Property A
  std::vector<Real> xs;
  {
    auto chain = cutting_points(map, M, depth + 1, w.critical_word);
    if (chain) xs = std::move(*chain);
  }
  w.flags_A.assign(depth + 1, false);
  w.flags_B.assign(depth + 1, false);
  w.levels.resize(depth + 1);
  for (int n = 0; n <= depth; ++n) {
    LevelReport& L = w.levels[n];
    auto fail = [&](const std::string& what) { L.failures.push_back(what); };
    if (static_cast<int>(xs.size()) < n + 2) {
      fail("cutting point chain undefined");
      w.J_seq.push_back(Enclosure(Real(-1), Real(1)));
      w.J_itineraries.push_back({});
    } else {
      const Real& xn = xs[n];
      const Real& xn1 = xs[n + 1];
      if (!(xn > -1 && xn < 0)) fail("x_n outside (-1, 0)");
      if (!(xn < xn1)) fail("x_n not increasing");
      // f(V_n) within I1: f is decreasing on [x_n, 0], so f(V_n) = [f(0), f(x_n)]
      Real fx = map.eval(xn);
      if (!(map.c0() >= P.I1.lo && fx <= 1)) fail("f(V_n) not inside I1");
      Real f2x = map.eval(fx);
      Real f20 = map.eval(map.c0());
      // J_n: pull-back of [-1,1] by f^{M_n - 2} along the orbit of f^2(0)
      std::vector<int> itin(w.critical_word.begin() + 2, w.critical_word.begin() + M[n]);
      Enclosure Jn(Real(-1), Real(1));
      bool diffeo = true;
      try {
        Jn = diffeo_pullback(map, Enclosure(Real(-1), Real(1)), itin);
      } catch (const Error&) {
        diffeo = false;
        fail("J_n pull-back not diffeomorphic");
      }
      int orient = 1;
      for (int b : itin) orient *= branch_sign(b);
      if (orient != 1) fail("f^{M_n-2} reverses orientation on J_n");
      Real slack = detail::residual_tolerance(map, M[n]);
      Enclosure Jwide(Jn.lo - slack, Jn.hi + slack);
      if (diffeo && !(Jwide.contains(f2x) && Jwide.contains(f20))) fail("J_n does not contain f^2(V_n)");
      w.J_seq.push_back(Jn);
      w.J_itineraries.push_back(itin);

      Real ret = map.iterate(xn, M[n]) + 1;
      Real chain = map.iterate(xn1, M[n]) - xn;
      L.log10_residual_return = detail::log10_abs(ret);
      L.log10_residual_chain = detail::log10_abs(chain);
      Real tol = detail::residual_tolerance(map, M[n]);
      if (abs(ret) > tol) fail("f^{M_n}(x_n) != -1");
      if (abs(chain) > tol) fail("f^{M_n}(x_{n+1}) != x_n");
      const Real& fm0 = at_return[n];
      if (!(fm0 >= xn && fm0 < 0 && fm0 > -1)) fail("f^{M_n}(0) not in V_n and (-1, 0)");
    }
    w.flags_A[n] = L.failures.empty();
    L.A = w.flags_A[n];
    w.flags_B[n] = first_B_failure[n] < 0;
    L.B = w.flags_B[n];
    if (!L.B) L.failures.push_back("f^{" + std::to_string(first_B_failure[n]) + "}(0) not in I0");
  }

  // x enclosures: x_0 from the closed form, x_{n+1} widened by |chain residual| / |Df^{M_n}(x_{n+1})|
  for (std::size_t n = 0; n < xs.size(); ++n) {
    Real err = ldexp(abs(xs[n]), 8 - working_bits());
    if (n >= 1) {
      Real res = abs(map.iterate(xs[n], M[n - 1]) - xs[n - 1]);
      double ld = log_deriv_iterate(map, xs[n], M[n - 1]);
      Real est = res * exp(Real(-ld));
      if (est > err) err = est;
    }
    w.x_seq.push_back(Enclosure(xs[n] - err, xs[n] + err));
  }

  // U_0 = (right end of I0, left end of I1); U_{n+1} = pull-back of U_n by f^{M_n} containing 0
  Real R = default_range(map).hi;
  w.U_seq.push_back(Enclosure(P.I0.hi, P.I1.lo));
  for (int n = 0; n <= depth; ++n) {
    auto c = pullback_containing(map, w.U_seq.back(), early, M[n], R);
    w.U_seq.push_back(c.interval);
  }
  for (const auto& U : w.U_seq) w.y_seq.push_back(Enclosure::point(U.lo));

  w.ordering_ok = xs.size() == static_cast<std::size_t>(depth + 2);
  for (int n = 0; n <= depth && w.ordering_ok; ++n) {
    if (!(w.y_seq[n].hi < xs[n] && xs[n] < w.y_seq[n + 1].lo && w.y_seq[n + 1].hi < 0)) w.ordering_ok = false;
  }
  return w;
}

}  // namespace qlab
