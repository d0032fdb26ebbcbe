#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "qlab/combinatorics.hpp"
#include "qlab/numerics/solve.hpp"
#include "qlab/pullback.hpp"

namespace qlab {

struct PeriodicOrbitRecord {
  int period = 0;
  std::vector<int> itinerary;
  Enclosure point;
  Real log_multiplier;  // ln|Df^period(point)|
  double lyapunov = 0;
  bool repelling = false;
};

struct SpectrumSummary {
  int max_period = 0;
  double chi_per_empirical = INFINITY;  // min lyapunov over repelling records
  double chi_lower = 0;                 // (1/2) ln lambda - 2 ln eta
  std::map<int, int> count_by_period;
  std::vector<double> running_min;  // running_min[p-1]: minimum over periods <= p
  int non_repelling = 0;
};

inline constexpr double kRepellingTolerance = 1e-12;

namespace detail {
inline Real log_multiplier(const QuarticMap& map, const Real& p, int n) {
  Real x = p, tmp, prod(1);
  for (int k = 0; k < n; ++k) {
    prod *= map.deriv(x);
    map.step(x, tmp);
  }
  return log(abs(prod));
}

inline Real iterate_minus(const QuarticMap& map, const Real& x0, int n) {
  Real x = x0, tmp;
  for (int k = 0; k < n; ++k) map.step(x, tmp);
  return x - x0;
}

// Zeros of f^n(x) - x on a cylinder where f^n is monotone; a non-expanding cylinder may hold several.
inline void cylinder_fixed_points(const QuarticMap& map, const Enclosure& C, int n, const Real& target,
                                  std::vector<Enclosure>& out) {
  constexpr int kPieces = 16;
  RealFn g = [&](const Real& x) { return iterate_minus(map, x, n); };
  std::vector<Real> xs, gs;
  for (int i = 0; i <= kPieces; ++i) {
    Real x = i == kPieces ? C.hi : C.lo + (C.hi - C.lo) * i / kPieces;
    xs.push_back(x);
    gs.push_back(g(x));
  }
  for (int i = 0; i <= kPieces; ++i) {
    if (gs[i].is_zero()) {
      out.emplace_back(xs[i], xs[i], working_bits());
      continue;
    }
    if (i < kPieces && !gs[i + 1].is_zero() && gs[i].sign() != gs[i + 1].sign())
      out.push_back(solve_monotone(g, Enclosure(xs[i], xs[i + 1]), target, PrecisionContext{working_bits()}));
  }
}
}  // namespace detail

/// Periodic points in [-1, 1] by least period, found word by word on the monotone branches.
/// Cylinders are built by pulling back along suffixes; empty cylinders prune every extension.
inline std::vector<PeriodicOrbitRecord> enumerate_periodic(const QuarticMap& map, int max_period) {
  require(max_period >= 1, ErrorKind::Precondition, "max_period must be at least 1");
  require(map.critical_value() > 1, ErrorKind::NotThreeComponents, "critical value must exceed 1");
  // widened so that the fixed point -1 sits inside its cylinder
  const Real R = Real(1) + Real("1e-3");
  const auto branches = monotone_branches(map, R);
  const long bits = working_bits();
  const Real target = ldexp(Real(1), -(bits - 16));
  const Real tol = ldexp(Real(1), -(bits / 2));

  std::vector<PeriodicOrbitRecord> out;
  std::vector<int> word;  // word[0] is the branch of the point itself

  auto record = [&](const Enclosure& e, int n) {
    Real p = e.mid();
    if (abs(p) > 1 + tol) return;
    if (abs(detail::iterate_minus(map, p, n)) > tol) return;
    for (int d = 1; d < n; ++d)
      if (n % d == 0 && abs(detail::iterate_minus(map, p, d)) <= tol) return;
    for (const auto& r : out)
      if (r.period == n && abs(r.point.mid() - p) <= tol) return;
    PeriodicOrbitRecord rec;
    rec.period = n;
    rec.itinerary = word;
    rec.point = e;
    rec.log_multiplier = detail::log_multiplier(map, p, n);
    rec.repelling = rec.log_multiplier.is_finite() && rec.log_multiplier > Real(std::log1p(kRepellingTolerance));
    rec.lyapunov = rec.log_multiplier.to_double() / n;
    out.push_back(std::move(rec));
  };

  std::function<void(const Enclosure&)> dfs = [&](const Enclosure& C) {
    int n = static_cast<int>(word.size());
    if (n > 0) {
      std::vector<Enclosure> zeros;
      detail::cylinder_fixed_points(map, C, n, target, zeros);
      for (const auto& z : zeros) record(z, n);
    }
    if (n == max_period) return;
    for (int s = 0; s < 4; ++s) {
      auto P = branch_preimage(map, branches[s], C);
      if (!P) continue;
      word.insert(word.begin(), s);
      dfs(*P);
      word.erase(word.begin());
    }
  };
  dfs(Enclosure(-R, R));

  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.period != y.period) return x.period < y.period;
    return x.point.lo < y.point.lo;
  });
  return out;
}

inline double chi_lower_bound(const QuarticMap& map, double eta) {
  return 0.5 * std::log(map.lambda().to_double()) - 2 * std::log(eta);
}

inline SpectrumSummary summarize_spectrum(const std::vector<PeriodicOrbitRecord>& recs, int max_period,
                                          double chi_lower) {
  SpectrumSummary s;
  s.max_period = max_period;
  s.chi_lower = chi_lower;
  s.running_min.assign(max_period, INFINITY);
  for (const auto& r : recs) {
    s.count_by_period[r.period]++;
    if (!r.repelling) {
      s.non_repelling++;
      continue;
    }
    s.running_min[r.period - 1] = std::min(s.running_min[r.period - 1], r.lyapunov);
  }
  for (int p = 1; p < max_period; ++p) s.running_min[p] = std::min(s.running_min[p], s.running_min[p - 1]);
  s.chi_per_empirical = s.running_min.empty() ? INFINITY : s.running_min.back();
  return s;
}

inline SpectrumSummary chi_per_empirical(const QuarticMap& map, int max_period, double eta) {
  return summarize_spectrum(enumerate_periodic(map, max_period), max_period, chi_lower_bound(map, eta));
}

struct CeSample {
  long n = 0;
  double log_deriv = 0;  // ln|Df^n(f(0))|
};

/// ln|Df^n(f(0))| for n = 1..N along the critical orbit.
inline std::vector<CeSample> ce_series(const QuarticMap& map, long N) {
  std::vector<CeSample> out;
  out.reserve(N);
  Real x = map.c0(), tmp;
  double acc = 0;
  for (long n = 1; n <= N; ++n) {
    if (abs(x) > 1)
      throw Error(ErrorKind::OrbitEscaped, "critical orbit leaves [-1, 1] at f^" + std::to_string(n) + "(0)");
    acc += map.deriv(x).log_abs();
    map.step(x, tmp);
    out.push_back({n, acc});
  }
  return out;
}

struct InducedStep {
  long m = 1;
  int level = -1;  // n with x in V_n \ V_{n+1}; -1 outside V_0
  double log_deriv = 0;
};

/// One step of the induced map: m = 1 off V_0 and M_n on V_n \ V_{n+1}, with V_n = [x_n, -x_n].
inline InducedStep induced_step(const QuarticMap& map, const CombinatoricsWitness& w, const Real& x) {
  require(!x.is_zero(), ErrorKind::Precondition, "the induced map is undefined at the critical point");
  require(!w.x_seq.empty(), ErrorKind::Precondition, "witness has no cutting points");
  Real ax = abs(x);
  InducedStep out;
  int levels = static_cast<int>(w.x_seq.size());
  if (ax > abs(w.x_seq[0].mid())) {
    out.log_deriv = map.deriv(x).log_abs();
    return out;
  }
  for (int n = 0; n + 1 < levels; ++n) {
    if (ax > abs(w.x_seq[n + 1].mid())) {
      out.level = n;
      out.m = w.M[n];
      out.log_deriv = log_deriv_iterate(map, x, out.m);
      return out;
    }
  }
  throw Error(ErrorKind::DepthExceeded,
              "point lies inside V_" + std::to_string(levels - 1) + "; the witness is too shallow");
}

/// Points of K from random backward chains of the given length started at the fixed point -1.
/// A fold branch is only used when the current point lies in its image [c0, 1].
inline std::vector<Real> sample_invariant_set(const QuarticMap& map, int count, std::uint64_t seed,
                                              int chain_length = 24, bool only_I0 = false) {
  std::mt19937_64 rng(seed);
  std::vector<Real> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    Real x(-1);
    for (int k = 0; k < chain_length; ++k) {
      int choices[4];
      int c = 0;
      bool last = k + 1 == chain_length;
      for (int s = 0; s < 4; ++s) {
        if ((s == 1 || s == 2) && x < map.c0()) continue;
        if (last && only_I0 && s != 0) continue;
        choices[c++] = s;
      }
      int s = choices[std::uniform_int_distribution<int>(0, c - 1)(rng)];
      auto y = inverse_branch(map, s, x);
      if (!y) break;
      x = *y;
    }
    out.push_back(x);
  }
  return out;
}

/// Points of K near the cutting point x_n: K points of I0 pulled back along the critical itinerary by f^{M_n}.
inline std::vector<Real> sample_invariant_set_near_cutting_point(const QuarticMap& map, const CombinatoricsWitness& w,
                                                                 int n, int count, std::uint64_t seed) {
  std::vector<Real> out;
  for (const Real& q : sample_invariant_set(map, count, seed, 16, true)) {
    auto y = chain_preimage(map, q, w.M[n], w.critical_word);
    if (y) out.push_back(*y);
  }
  return out;
}

}  // namespace qlab
