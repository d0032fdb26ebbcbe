#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qlab/combinatorics.hpp"
#include "qlab/pullback.hpp"
#include "qlab/spectrum.hpp"

namespace qlab {

/// One inequality, compared in log space. margin >= 0 exactly when the relation holds.
struct NamedCheck {
  std::string id;
  double lhs = 0;  // natural log of the left side
  double rhs = 0;  // natural log of the right side
  std::string relation;  // "<=" or ">="
  double margin = 0;
  bool pass = false;
};

inline NamedCheck log_check(std::string id, double lhs, const std::string& relation, double rhs) {
  NamedCheck c{std::move(id), lhs, rhs, relation, 0, false};
  if (lhs == rhs) c.margin = 0;  // also covers matching infinities
  else c.margin = relation == "<=" ? rhs - lhs : lhs - rhs;
  c.pass = !std::isnan(c.margin) && c.margin >= 0;
  return c;
}

/// As log_check, with the margin ln(lhs/rhs) evaluated in working precision for near-equal sides.
inline NamedCheck ratio_check(std::string id, const Real& lhs, const std::string& relation, const Real& rhs) {
  NamedCheck c{std::move(id), abs(lhs).log_abs(), abs(rhs).log_abs(), relation, 0, false};
  double lr = log(abs(lhs) / abs(rhs)).to_double();
  c.margin = relation == "<=" ? -lr : lr;
  c.pass = !std::isnan(c.margin) && c.margin >= 0;
  return c;
}

inline double ln_abs(const Real& x) { return x.is_zero() ? -INFINITY : x.log_abs(); }

inline bool all_pass(const std::vector<NamedCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const NamedCheck& c) { return c.pass; });
}

inline constexpr int kDefaultSamples = 33;

namespace detail {
// Admissible branch words up to the given length; a fold branch (1 or 2) is followed by branch 3.
inline void admissible_words(int max_len, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (!cur.empty()) out.push_back(cur);
  if (static_cast<int>(cur.size()) == max_len) return;
  for (int s = 0; s < 4; ++s) {
    if (!cur.empty() && (cur.back() == 1 || cur.back() == 2) && s != 3) continue;
    cur.push_back(s);
    admissible_words(max_len, cur, out);
    cur.pop_back();
  }
}

inline QuarticMap map_at(const CombinatoricsWitness& w, long bits) {
  PrecisionScope scope(bits);
  return QuarticMap(w.a_text, w.tau_text);
}

// Enough bits to resolve a pull-back by f^m and follow its orbit back out.
inline long bits_for_depth(const QuarticMap& map, long m, long cap) {
  double l2 = std::log2(map.lambda().to_double()) + 1;
  return std::min(cap, std::max(256L, static_cast<long>(std::ceil(2 * m * l2)) + 256));
}
}  // namespace detail

/// Distortion, inclusion and square-root-ratio checks for one map.
inline std::vector<NamedCheck> verify_macro(const QuarticMap& map, double eta, int samples = kDefaultSamples,
                                            int word_length = 5) {
  require(map.a() >= 20, ErrorKind::Precondition, "verify_macro needs a >= 20");
  require(map.tau() >= 0 && map.tau() <= 2, ErrorKind::Precondition, "tau must lie in [0, 2]");
  std::vector<NamedCheck> out;
  const double leta = std::log(eta);
  const Real two(2);

  // distortion of f^m on the pull-back of [-2, 2] along each admissible word
  std::vector<std::vector<int>> words;
  std::vector<int> cur;
  detail::admissible_words(word_length, cur, words);
  double worst = 0;
  std::string worst_word;
  for (const auto& w : words) {
    try {
      auto d = distortion(map, Enclosure(-two, two), w, samples);
      if (d.log_distortion > worst) {
        worst = d.log_distortion;
        worst_word.clear();
        for (int s : w) worst_word += static_cast<char>('0' + s);
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotDiffeomorphic) throw;
    }
  }
  out.push_back(log_check("macro-distortion" + (worst_word.empty() ? "" : "-w" + worst_word), worst, "<=", leta));

  BranchPartition P = branch_partition(map);
  Real two_over_a = 2 / map.a();
  out.push_back(log_check("macro-inclusion-I0", ln_abs(P.I0.hi + 1), "<=", ln_abs(two_over_a)));
  out.push_back(log_check("macro-inclusion-V", ln_abs(P.V.hi), "<=", ln_abs(2 * sqrt(map.tau() / map.a()))));
  out.push_back(log_check("macro-inclusion-I1", ln_abs(1 - P.I1.lo), "<=", ln_abs(two_over_a)));
  out.push_back(log_check("macro-inclusion-I1-upper", ln_abs(P.I1.hi), "<=", 0));

  // square-root ratios on V where f lands in I1; they only describe maps with f(0) in I1
  if (!P.I1.contains(map.c0())) return out;
  Real f2_0 = map.iterate(Real(0), 2);
  const double ll = std::log(map.lambda().to_double());
  const double ls2 = 0.5 * std::log(2.0);
  double lo1 = INFINITY, hi1 = -INFINITY, lo2 = INFINITY, hi2 = -INFINITY;
  std::vector<Real> xs;
  for (int k = 0; k < samples; ++k) xs.push_back(ldexp(P.V.hi, -k));  // geometric towards 0
  for (const Real& x : lobatto_points(Enclosure(Real(0), P.V.hi), samples)) xs.push_back(x);
  for (const Real& x : xs) {
    if (x.is_zero()) continue;
    Real fx = map.eval(x);
    if (fx < P.I1.lo || fx > P.I1.hi) continue;
    double ld = ln_abs(f2_0 - map.eval(fx));
    if (!std::isfinite(ld)) continue;
    double r1 = ln_abs(x) - (ls2 - ll + 0.5 * ld);
    double r2 = ln_abs(map.deriv(x) * map.deriv(fx)) - (ls2 + ll + 0.5 * ld);
    lo1 = std::min(lo1, r1);
    hi1 = std::max(hi1, r1);
    lo2 = std::min(lo2, r2);
    hi2 = std::max(hi2, r2);
  }
  if (std::isfinite(lo1)) {
    out.push_back(log_check("macro-ratio-position-lower", lo1, ">=", -leta));
    out.push_back(log_check("macro-ratio-position-upper", hi1, "<=", leta));
    out.push_back(log_check("macro-ratio-derivative-lower", lo2, ">=", -leta));
    out.push_back(log_check("macro-ratio-derivative-upper", hi2, "<=", leta));
  }
  return out;
}

/// Expansion on J_n, size of x_n and the derivative at x_n for every witness level.
inline std::vector<NamedCheck> verify_close_return(const CombinatoricsWitness& w, int samples = kDefaultSamples) {
  require(!w.J_seq.empty(), ErrorKind::Precondition, "witness has no levels");
  std::vector<NamedCheck> out;
  const double le = std::log(w.eta);
  const double ls2 = 0.5 * std::log(2.0);
  for (int n = 0; n <= w.depth; ++n) {
    const long M = w.M[n];
    long bits = detail::bits_for_depth(detail::map_at(w, 256), M, w.bits);
    PrecisionScope scope(bits);
    QuarticMap map = detail::map_at(w, bits);
    const double ll = std::log(map.lambda().to_double());
    const std::string sfx = "-n" + std::to_string(n);

    Enclosure J(w.J_seq[n].lo.rounded(), w.J_seq[n].hi.rounded());
    double dmin = INFINITY, dmax = -INFINITY;
    for (const Real& x : lobatto_points(J, samples)) {
      double d = log_deriv_iterate(map, x, M - 2);
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    }
    out.push_back(log_check("close-return-expansion-lower" + sfx, dmin, ">=", (M - 2) * (ll - le)));
    out.push_back(log_check("close-return-expansion-upper" + sfx, dmax, "<=", (M - 2) * (ll + le)));

    Real xn = w.x_seq[n].mid().rounded();
    double lx = ln_abs(xn);
    out.push_back(log_check("cutting-point-lower" + sfx, lx, ">=", -0.5 * M * (le + ll)));
    out.push_back(log_check("cutting-point-upper" + sfx, lx, "<=", ls2 + 0.5 * M * (le - ll)));

    double dx = log_deriv_iterate(map, xn, M);
    out.push_back(log_check("close-return-derivative-lower" + sfx, dx, ">=", -(1.5 * M - 2) * le + 0.5 * M * ll));
    out.push_back(log_check("close-return-derivative-upper" + sfx, dx, "<=", ls2 + (1.5 * M - 2) * le + 0.5 * M * ll));
  }
  return out;
}

/// Gap points y_n, the ordering of the cutting points and expansion on V_n \ U_{n+1}.
inline std::vector<NamedCheck> verify_long_branch(const CombinatoricsWitness& w, int samples = kDefaultSamples) {
  require(w.y_seq.size() >= static_cast<std::size_t>(w.depth + 2), ErrorKind::Precondition,
          "witness lacks gap points");
  std::vector<NamedCheck> out;
  const double le = std::log(w.eta);
  const QuarticMap coarse = detail::map_at(w, 256);
  const double ll = std::log(coarse.lambda().to_double());

  Real d0 = w.x_seq[0].mid() - w.y_seq[0].mid();
  out.push_back(log_check("gap-point-base-n0", ln_abs(d0), ">=", std::log(5.0 / 8.0)));
  out.push_back(log_check("gap-point-first", ln_abs(w.y_seq[1].mid()), ">=", 0.5 * std::log(1.25) - le - ll));

  for (int n = 0; n <= w.depth; ++n) {
    const long M = w.M[n];
    const std::string sfx = "-n" + std::to_string(n);
    const Real& x1 = w.x_seq[n + 1].mid();
    const Real& y1 = w.y_seq[n + 1].mid();
    double gap = ln_abs(x1 - y1);
    out.push_back(ratio_check("gap-point-order" + sfx, y1, ">=", x1 - y1));
    out.push_back(log_check("gap-point" + sfx, gap, ">=", -M * le - 0.5 * M * ll));

    bool ordered = w.y_seq[n].mid() < w.x_seq[n].mid() && w.x_seq[n].mid() < y1 && y1 < 0;
    out.push_back(log_check("ordering" + sfx, ordered ? 0.0 : -1.0, ">=", 0.0));

    long bits = detail::bits_for_depth(coarse, M, w.bits);
    PrecisionScope scope(bits);
    QuarticMap map = detail::map_at(w, bits);
    const double lln = std::log(map.lambda().to_double());
    Enclosure outer(w.x_seq[n].mid().rounded(), y1.rounded());
    double dmin = INFINITY;
    for (const Real& x : lobatto_points(outer, samples)) dmin = std::min(dmin, log_deriv_iterate(map, x, M));
    out.push_back(log_check("gap-derivative" + sfx, dmin, ">=", -2 * M * le + 0.5 * M * lln));
  }
  return out;
}

/// ln|Df^m(f(0))| >= m (ln(lambda)/2 - 3 ln eta) for m <= horizon (default 2 M_depth).
inline std::vector<NamedCheck> verify_collet_eckmann(const CombinatoricsWitness& w, long horizon = 0) {
  if (horizon <= 0) horizon = 2 * w.M[w.depth];
  require(horizon < w.M[w.depth + 1], ErrorKind::DepthInsufficient, "horizon reaches the next return");
  // the orbit shadows -1 until the next return, so the full witness precision is needed
  PrecisionScope scope(w.bits);
  QuarticMap map = detail::map_at(w, w.bits);
  const double rate = 0.5 * std::log(map.lambda().to_double()) - 3 * std::log(w.eta);
  double worst = INFINITY, lhs = 0, rhs = 0;
  long at = 0;
  for (const auto& s : ce_series(map, horizon)) {
    double m = s.log_deriv - s.n * rate;
    if (m < worst) {
      worst = m;
      lhs = s.log_deriv;
      rhs = s.n * rate;
      at = s.n;
    }
  }
  return {log_check("collet-eckmann-lower-m" + std::to_string(at), lhs, ">=", rhs)};
}

struct InducedExpansionReport {
  int sampled = 0;
  int dropped = 0;  // samples inside V_{depth+1}
  std::map<int, int> by_level;
  std::vector<NamedCheck> checks;  // worst sample per level
};

/// ln|Df^m(x)| >= m (ln(lambda)/2 - 2 ln eta) for the induced time m(x) at sampled points of K.
/// A tenth of the samples per level is drawn near each cutting point, the rest from random chains.
inline InducedExpansionReport verify_induced_expansion(const CombinatoricsWitness& w, int count, std::uint64_t seed) {
  InducedExpansionReport out;
  const int near = count / 10;
  const int random = count - near * (w.depth + 1);
  require(near > 0 && random > 0, ErrorKind::Precondition, "too few samples for the witness depth");
  std::map<int, std::pair<double, NamedCheck>> worst;
  auto take = [&](const QuarticMap& map, const std::vector<Real>& pts, double rate) {
    for (const Real& x : pts) {
      if (x.is_zero()) continue;
      InducedStep st;
      try {
        st = induced_step(map, w, x);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DepthExceeded) throw;
        out.dropped++;
        continue;
      }
      out.sampled++;
      out.by_level[st.level]++;
      double rhs = st.m * rate;
      double m = st.log_deriv - rhs;
      auto it = worst.find(st.level);
      if (it == worst.end() || m < it->second.first) {
        std::string id = st.level < 0 ? "induced-expansion-outside" : "induced-expansion-n" + std::to_string(st.level);
        worst[st.level] = {m, log_check(id, st.log_deriv, ">=", rhs)};
      }
    }
  };
  {
    PrecisionScope scope(256);
    QuarticMap map(w.a_text, w.tau_text);
    double rate = 0.5 * std::log(map.lambda().to_double()) - 2 * std::log(w.eta);
    take(map, sample_invariant_set(map, random, seed), rate);
  }
  for (int n = 0; n <= w.depth; ++n) {
    long bits = detail::bits_for_depth(detail::map_at(w, 256), w.M[n], w.bits);
    PrecisionScope scope(bits);
    QuarticMap map = detail::map_at(w, bits);
    double rate = 0.5 * std::log(map.lambda().to_double()) - 2 * std::log(w.eta);
    take(map, sample_invariant_set_near_cutting_point(map, w, n, near, seed + 1 + n), rate);
  }
  for (auto& [level, p] : worst) out.checks.push_back(p.second);
  return out;
}

struct WnMeasurement {
  int n = 0;
  long steps = 0;           // 2 M_{n+1} + 2 - N0
  bool in_hypothesis = false;  // n >= 1 and M_{n+1} - 2 M_n >= N0
  double log_len = 0;       // ln |W_n|
  double log_bound = 0;     // ln of the lower bound for |W_n|
  std::vector<NamedCheck> checks;
  std::vector<int> itinerary;
  std::optional<double> shrink_log_max;  // ln of the largest component at the same depth, when computed
  bool shrink_truncated = false;          // beam search dropped components, so the comparison is informational
};

struct GapReport {
  double eta = 0;
  double lambda = 0;
  double chi_lower = 0;
  double chi_per_empirical = 0;
  int chi_max_period = 0;
  double rate_bound = 0;
  bool gate = false;  // lambda > eta^19, checked on its own
  int N0 = 0;
  std::vector<WnMeasurement> wn;
  bool verdict = false;
};

/// Least N0 >= 0 with lambda^{-N0} <= delta.
inline int n0_for_delta(const QuarticMap& map, double delta) {
  require(delta > 0, ErrorKind::Precondition, "delta must be positive");
  double ll = std::log(map.lambda().to_double());
  double n = std::ceil(-std::log(delta) / ll - 1e-12);
  return static_cast<int>(std::max(0.0, n));
}

/// Builds J' -> J'' -> J''' -> W_n for J = [-1 - lambda^{-N0}, -1] along the orbit of x_{n+2}.
inline WnMeasurement measure_wn(const CombinatoricsWitness& w, int n, int N0) {
  require(n >= 0, ErrorKind::Precondition, "level must be non-negative");
  if (static_cast<int>(w.x_seq.size()) < n + 3)
    throw Error(ErrorKind::DepthInsufficient,
                "W_" + std::to_string(n) + " needs x_" + std::to_string(n + 2) + "; witness depth is " +
                    std::to_string(w.depth));
  const long Mn = w.M[n], Mn1 = w.M[n + 1];
  if (Mn1 - 2 * Mn < N0)
    throw Error(ErrorKind::DepthInsufficient, "M_{n+1} - 2 M_n < N0 at n = " + std::to_string(n));

  PrecisionScope scope(w.bits);
  const QuarticMap map = detail::map_at(w, w.bits);
  const double le = std::log(w.eta), ll = std::log(map.lambda().to_double());
  WnMeasurement out;
  out.n = n;
  out.steps = 2 * Mn1 + 2 - N0;
  out.in_hypothesis = n >= 1;

  std::vector<Real> pts;
  pts.reserve(out.steps + 1);
  Real x = w.x_seq[n + 2].mid(), tmp;
  for (long k = 0; k <= out.steps; ++k) {
    pts.push_back(x);
    map.step(x, tmp);
  }
  auto slice = [&](long from, long count) {
    return std::vector<Real>(pts.begin() + from, pts.begin() + from + count);
  };
  const Real R = default_range(map).hi;
  Enclosure J(-1 - pow(map.lambda(), Real(-N0)), Real(-1));

  auto J1 = pullback_containing(map, J, slice(Mn1 + 2, Mn1 - N0), Mn1 - N0, R);
  auto J2 = pullback_containing(map, J1.interval, slice(Mn1, 2), 2, R);
  auto J3 = pullback_containing(map, J2.interval, slice(2, Mn1 - 2), Mn1 - 2, R);
  auto W = pullback_containing(map, J3.interval, slice(0, 2), 2, R);

  // J' is claimed diffeomorphic: rebuild it through diffeo_pullback along its own itinerary
  Enclosure J1d = diffeo_pullback(map, J, J1.itinerary);
  double l1 = ln_abs(J1.interval.width());
  const std::string sfx = "-n" + std::to_string(n);
  out.checks.push_back(log_check("wn-first-pullback-diffeo" + sfx, ln_abs(J1d.width()) - l1, ">=", -1e-9));
  out.checks.push_back(log_check("wn-before-first-root-lower" + sfx, l1, ">=",
                                 -0.5 * std::log(2.0) - (2.5 * Mn - 3) * le + (-Mn1 + 0.5 * Mn) * ll));
  out.checks.push_back(log_check("wn-before-first-root-upper" + sfx, l1, "<=",
                                 (2.5 * Mn - 3) * le + (-Mn1 + 0.5 * Mn) * ll));
  out.checks.push_back(log_check("wn-after-first-root" + sfx, ln_abs(J2.interval.width()), ">=",
                                 -2 * std::log(2.0) - 0.5 * Mn1 * le + (-0.5 * Mn1 - 2) * ll));
  out.checks.push_back(log_check("wn-before-second-root" + sfx, ln_abs(J3.interval.width()), ">=",
                                 -2 * std::log(2.0) - 1.5 * Mn1 * le - 1.5 * Mn1 * ll));
  out.log_len = ln_abs(W.interval.width());
  out.log_bound = -std::log(4 * w.eta) - ll - 0.75 * Mn1 * (le + ll);
  out.checks.push_back(log_check("wn-after-second-root" + sfx, out.log_len, ">=", out.log_bound));
  out.checks.push_back(log_check("wn-contains-x" + sfx, W.interval.contains(pts[0]) ? 0.0 : -1.0, ">=", 0.0));
  // a full component: both end points land on the boundary of J
  const Real tol = J.width() * ldexp(Real(1), -(w.bits / 2));
  bool ends_ok = true;
  for (const Real* e : {&W.interval.lo, &W.interval.hi}) {
    Real y = map.iterate(*e, out.steps);
    ends_ok = ends_ok && min(abs(y - J.lo), abs(y - J.hi)) <= tol;
  }
  out.checks.push_back(log_check("wn-is-component" + sfx, ends_ok ? 0.0 : -1.0, ">=", 0.0));
  out.itinerary = W.itinerary;
  return out;
}

/// The rate comparison, the closed-form gate and W_n measurements for n in levels.
inline GapReport verify_main_gap(const CombinatoricsWitness& w, int N0, const std::vector<int>& levels,
                                 int chi_max_period = 8, int shrink_horizon = 0) {
  GapReport g;
  g.eta = w.eta;
  g.N0 = N0;
  {
    PrecisionScope scope(256);
    QuarticMap map(w.a_text, w.tau_text);
    g.lambda = map.lambda().to_double();
    auto s = chi_per_empirical(map, chi_max_period, w.eta);
    g.chi_per_empirical = s.chi_per_empirical;
  }
  g.chi_max_period = chi_max_period;
  g.chi_lower = 0.5 * std::log(g.lambda) - 2 * std::log(w.eta);
  g.rate_bound = 0.375 * std::log(w.eta * g.lambda);
  g.gate = std::log(g.lambda) > 19 * std::log(w.eta);

  bool measured_ok = true;
  for (int n : levels) {
    WnMeasurement m = measure_wn(w, n, N0);
    if (shrink_horizon >= m.steps) {
      PrecisionScope scope(detail::bits_for_depth(detail::map_at(w, 256), m.steps, w.bits));
      QuarticMap map(w.a_text, w.tau_text);
      Enclosure J(-1 - pow(map.lambda(), Real(-N0)), Real(-1));
      auto series = shrink_rate_series(map, J, static_cast<int>(m.steps), default_range(map));
      if (static_cast<long>(series.samples.size()) >= m.steps) {
        m.shrink_log_max = ln_abs(series.samples[m.steps - 1].max_len);
        m.shrink_truncated = series.truncated;
        if (!series.truncated)
          m.checks.push_back(log_check("wn-within-shrink-max-n" + std::to_string(n), m.log_len, "<=",
                                       *m.shrink_log_max + 1e-9));
      }
    }
    if (m.in_hypothesis) measured_ok = measured_ok && all_pass(m.checks);
    g.wn.push_back(std::move(m));
  }
  g.verdict = g.rate_bound < g.chi_lower && g.chi_lower <= g.chi_per_empirical && measured_ok;
  return g;
}

struct ShrinkProbe {
  RateSeries series;
  double delta = 0;
  std::vector<double> normalized_rates;  // (1/n) ln(max_len / delta)
  double fitted_rho = 0;                 // exp(-slope) of a least-squares fit of ln max_len against n
  double min_normalized_rate = 0;
};

/// Pull-backs of B(-1, delta) and a fitted exponential shrink rate.
inline ShrinkProbe shrink_probe(const QuarticMap& map, const Real& delta, int n_max,
                                std::size_t cap = 4096) {
  require(delta > 0, ErrorKind::Precondition, "delta must be positive");
  ShrinkProbe out;
  out.delta = delta.to_double();
  Enclosure range = default_range(map);
  Enclosure J(max(Real(-1) - delta, range.lo), min(Real(-1) + delta, range.hi));
  out.series = shrink_rate_series(map, J, n_max, range, cap);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double ldelta = ln_abs(delta);
  out.min_normalized_rate = INFINITY;
  for (const auto& s : out.series.samples) {
    double y = ln_abs(s.max_len);
    double r = (y - ldelta) / s.n;
    out.normalized_rates.push_back(r);
    out.min_normalized_rate = std::min(out.min_normalized_rate, r);
    sx += s.n;
    sy += y;
    sxx += double(s.n) * s.n;
    sxy += s.n * y;
  }
  double k = static_cast<double>(out.series.samples.size());
  if (k >= 2) out.fitted_rho = std::exp(-(k * sxy - sx * sy) / (k * sxx - sx * sx));
  return out;
}

/// Image of an interval: hull of endpoint values and critical values inside.
inline Enclosure interval_image(const QuarticMap& map, const Enclosure& I) {
  Real lo = min(map.eval(I.lo), map.eval(I.hi));
  Real hi = max(map.eval(I.lo), map.eval(I.hi));
  for (const Real& c : {map.c_minus(), Real(0), map.c_plus()}) {
    if (I.contains(c)) {
      Real v = map.eval(c);
      lo = min(lo, v);
      hi = max(hi, v);
    }
  }
  return Enclosure(lo, hi);
}

/// Least k <= max_iter with f^k(seed) covering [-1, 1].
inline int exactness_probe(const QuarticMap& map, const Enclosure& seed, int max_iter) {
  require(seed.hi >= -1 && seed.lo <= 1, ErrorKind::Precondition, "seed does not meet [-1, 1]");
  BranchPartition P = branch_partition(map);
  bool in_gap = (P.G_left.contains(seed.lo) && P.G_left.contains(seed.hi)) ||
                (P.G_right.contains(seed.lo) && P.G_right.contains(seed.hi));
  require(!in_gap, ErrorKind::Precondition, "seed lies inside a gap");
  Enclosure I = seed;
  const Enclosure target(Real(-1), Real(1));
  for (int k = 0; k <= max_iter; ++k) {
    if (I.contains(target)) return k;
    I = interval_image(map, I);
  }
  throw Error(ErrorKind::NotCoveredWithinBudget,
              "image does not cover [-1, 1] after " + std::to_string(max_iter) + " steps");
}

}  // namespace qlab
