#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qlab/combinatorics.hpp"
#include "qlab/numerics/solve.hpp"

namespace qlab {

struct TunerConfig {
  int grid = 1024;           // initial scan points
  int densify_attempts = 3;  // grid doublings before CrossingNotFound
  long precision_cap = 1L << 22;
  std::function<void(const std::string&)> log;  // progress messages, may be empty
};

/// First sign change of fn on [lo, hi] scanning left to right.
/// Scan points use scan_bits; the left end and the final bracket use solve_bits.
inline Enclosure least_crossing(const RealFn& fn, const Real& lo, const Real& hi, long scan_bits, long solve_bits,
                                const Real& target, const TunerConfig& cfg, const std::string& label) {
  PrecisionScope outer(solve_bits);
  Real L = lo.rounded(), H = hi.rounded();
  int s0 = fn(L).sign();
  if (s0 == 0) return Enclosure(L, L, solve_bits);
  auto sign_at = [&](const Real& t, long bits) {
    PrecisionScope s(bits);
    return fn(t).sign();
  };
  for (int attempt = 0; attempt <= cfg.densify_attempts; ++attempt) {
    long G = static_cast<long>(cfg.grid) << attempt;
    long sb = std::min(solve_bits, scan_bits << (attempt / 2));
    Real prev = L;
    for (long i = 1; i <= G; ++i) {
      Real t = (i == G) ? H : L + (H - L) * static_cast<long>(i) / G;
      int s = sign_at(t, sb);
      if (s == s0) {
        prev = t;
        continue;
      }
      if (sb != solve_bits) {
        s = sign_at(t, solve_bits);
        if (s == s0) {
          prev = t;
          continue;
        }
      }
      if (s == 0) return Enclosure(t, t, solve_bits);
      Real left = prev;
      if (sb != solve_bits && !(left == L) && sign_at(left, solve_bits) != s0) {
        // scan precision misjudged the previous point; fall back to the whole scanned range
        left = L;
      }
      if (cfg.log) cfg.log(label + ": bracket found at grid point " + std::to_string(i) + "/" + std::to_string(G));
      return solve_monotone(fn, Enclosure(left, t, solve_bits), target, PrecisionContext(solve_bits));
    }
  }
  throw Error(ErrorKind::CrossingNotFound, label + ": no sign change on [" + lo.str(20) + ", " + hi.str(20) + "]");
}

struct TuneResult {
  CombinatoricsWitness witness;
  std::vector<Enclosure> tau_levels;  // T_0 .. T_{depth+1}
};

/// Nested-interval tuner. Level 0: least tau with f(0) = left end of I1, T_0 = [0, tau_0].
/// Level n+1: tau- (f^{M_n}(0) = x_n), tau+ (f^{M_n}(0) = 0), then the least tau with
/// f^{M_{n+1}}(0) = 1, found as f^{2 M_n}(0) = g_0^K(1) with K = M_{n+1} - 2 M_n.
/// The witness is checked at the midpoint of T_{depth+1}.
inline TuneResult tune_tau(const std::string& a_text, const ReturnTimeSequence& seq, int depth,
                           const TunerConfig& cfg = {}) {
  const auto& M = seq.M;
  require(Real(a_text) >= 20, ErrorKind::Precondition, "a must be at least 20");
  require(depth >= 0, ErrorKind::Precondition, "negative depth");
  require(static_cast<int>(M.size()) >= depth + 2, ErrorKind::DepthInsufficient,
          "return-time list needs entries up to M[depth+1]");
  require(admissible(M), ErrorKind::Precondition, "M is not admissible");
  const double l2 = log2_lambda_max(a_text);
  auto scan_bits_for = [&](long m) {
    return std::max<long>(256, static_cast<long>(std::ceil(1.7 * static_cast<double>(m) * l2)) + 128);
  };
  auto map_at = [&](const Real& tau) { return QuarticMap(a_text, tau.str()); };
  auto note = [&](const std::string& s) {
    if (cfg.log) cfg.log(s);
  };

  TuneResult out;
  // level 0
  {
    long bits = precision_for_return_time(a_text, M[0]);
    PrecisionScope scope(bits);
    RealFn f0 = [&](const Real& tau) {
      QuarticMap f = map_at(tau);
      return f.c0() - branch_partition(f).I1.lo;
    };
    Enclosure t0 = least_crossing(f0, Real(0), Real(2), 256, bits, tau_target_width(a_text, M[0]), cfg, "tau_0");
    out.tau_levels.push_back(Enclosure(Real(0), t0.lo, bits));
    note("level 0: T_0 = " + out.tau_levels.back().str(12));
  }

  for (int n = 0; n <= depth; ++n) {
    const Enclosure& T = out.tau_levels.back();
    const long solve_bits = precision_for_return_time(a_text, M[n + 1]);
    if (solve_bits > cfg.precision_cap)
      throw Error(ErrorKind::PrecisionCapExceeded, "level " + std::to_string(n + 1) + " needs " +
                                                       std::to_string(solve_bits) + " bits");
    const long scan_bits = std::min(solve_bits, scan_bits_for(M[n]));
    const Real target = tau_target_width(a_text, M[n + 1]);
    const long Mn = M[n];
    const long K = M[n + 1] - 2 * M[n];

    RealFn psi = [&](const Real& tau) {
      QuarticMap f = map_at(tau);
      CriticalOrbitScan s = scan_critical_orbit(f, Mn);
      auto xs = cutting_points(f, M, n, s.branches);
      if (!xs) throw Error(ErrorKind::PrecisionExhausted, "cutting point chain undefined during tuning");
      return s.last - xs->back();
    };
    Enclosure tminus = least_crossing(psi, T.lo, T.hi, scan_bits, solve_bits, target, cfg,
                                      "tau-_" + std::to_string(n + 1));
    note("level " + std::to_string(n + 1) + ": tau- located");

    RealFn zero_cross = [&](const Real& tau) {
      QuarticMap f = map_at(tau);
      return f.iterate(Real(0), Mn);
    };
    Enclosure tplus = least_crossing(zero_cross, tminus.hi, T.hi, scan_bits, solve_bits, target, cfg,
                                     "tau+_" + std::to_string(n + 1));
    note("level " + std::to_string(n + 1) + ": tau+ located");

    // relative accuracy of the shadowing target only needs ~M_n/2 * log2(lambda) bits
    const long rho_bits = std::min(
        solve_bits, std::max<long>(256, static_cast<long>(std::ceil(0.6 * static_cast<double>(Mn) * l2)) + 128));
    RealFn phi = [&](const Real& tau) {
      Real u0 = map_at(tau).iterate(Real(0), 2 * Mn) + 1;
      Real rho;
      {
        PrecisionScope s(std::min(rho_bits, working_bits()));
        rho = fixed_point_shadow(map_at(tau), K);
      }
      return u0 - rho;
    };
    Enclosure tnext = least_crossing(phi, tminus.hi, tplus.hi, scan_bits, solve_bits, target, cfg,
                                     "tau_" + std::to_string(n + 1));
    {
      PrecisionScope scope(solve_bits);
      out.tau_levels.push_back(Enclosure(tminus.hi, tnext.lo, solve_bits));
    }
    note("level " + std::to_string(n + 1) + ": T = " + out.tau_levels.back().str(12));
  }

  const Enclosure& last = out.tau_levels.back();
  long bits = precision_for_return_time(a_text, M[depth + 1]);
  PrecisionScope scope(bits);
  Real mid = last.mid();
  QuarticMap f(a_text, mid.str());
  out.witness = check_type_M(f, seq, depth);
  out.witness.tau = last;
  out.witness.tau_levels = out.tau_levels;
  return out;
}

}  // namespace qlab
