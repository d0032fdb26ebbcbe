#pragma once

#include <functional>
#include <optional>
#include <string>

#include "qlab/numerics/enclosure.hpp"

namespace qlab {

using RealFn = std::function<Real(const Real&)>;

/// Bracketing root solver (Brent): inverse quadratic and secant steps with a bisection safeguard.
/// Every iterate keeps a sign change, so the result is certified by sign alone.
inline Enclosure solve_monotone(const RealFn& fn, const Enclosure& bracket, const Real& target_width,
                                PrecisionContext ctx) {
  PrecisionScope scope(ctx);
  Real a = bracket.lo.rounded();
  Real b = bracket.hi.rounded();
  Real fa = fn(a);
  Real fb = fn(b);
  if (!fa.is_finite() || !fb.is_finite())
    throw Error(ErrorKind::PrecisionExhausted, "non-finite value at bracket endpoint");
  if (fa.is_zero()) return Enclosure(a, a, ctx.bits);
  if (fb.is_zero()) return Enclosure(b, b, ctx.bits);
  if (fa.sign() == fb.sign())
    throw Error(ErrorKind::NoSignChange, "bracket " + bracket.str(20) + " has no sign change");

  const Real eps = ldexp(Real(1), -static_cast<long>(ctx.bits) + 1);
  const Real half_target = ldexp(target_width, -1);
  Real c = a, fc = fa;
  Real d = b - a, e = d;
  const long max_iter = 8 * ctx.bits + 200;
  for (long iter = 0; iter < max_iter; ++iter) {
    if (fb.sign() == fc.sign()) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (abs(fc) < abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    // b is the best estimate, c the opposite-sign endpoint
    Real tol = 2 * eps * abs(b) + ldexp(half_target, -1);
    Real m = ldexp(c - b, -1);
    if (abs(m) <= tol || fb.is_zero()) {
      if (fb.is_zero()) return Enclosure(b, b, ctx.bits);
      Enclosure out(min(b, c), max(b, c), ctx.bits);
      if (out.width() <= target_width) return out;
      if (abs(m) <= 2 * eps * abs(b))
        throw Error(ErrorKind::PrecisionExhausted,
                    "bracket cannot be split at " + std::to_string(ctx.bits) + " bits");
    }
    if (abs(e) >= tol && abs(fa) > abs(fb)) {
      Real p, q, r;
      Real s = fb / fa;
      if (a == c) {
        p = 2 * m * s;
        q = 1 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2 * m * q * (q - r) - (b - a) * (r - 1));
        q = (q - 1) * (r - 1) * (s - 1);
      }
      if (p > 0) q = -q;
      else p = -p;
      if (2 * p < min(3 * m * q - abs(tol * q), abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    if (abs(d) > tol) b += d;
    else b += m > 0 ? tol : -tol;
    fb = fn(b);
    if (!fb.is_finite()) throw Error(ErrorKind::PrecisionExhausted, "non-finite value inside bracket");
  }
  throw Error(ErrorKind::PrecisionExhausted, "iteration cap reached before target width");
}

/// True when fn has strictly opposite signs at the enclosure endpoints, evaluated at the given precision.
inline bool certify_sign_change(const RealFn& fn, const Enclosure& enc, PrecisionContext ctx) {
  PrecisionScope scope(ctx);
  if (enc.is_point()) return fn(enc.lo.rounded()).is_zero();
  Real a = fn(enc.lo.rounded());
  Real b = fn(enc.hi.rounded());
  return a.sign() * b.sign() < 0 || a.is_zero() || b.is_zero();
}

enum class Verdict { Pass, Fail, Inconclusive };

inline constexpr long kDefaultPrecisionCap = 65536;

/// Raised when escalation hits the cap; keeps the last result for diagnostics.
template <class T>
class PrecisionCapError : public Error {
 public:
  PrecisionCapError(T last, long bits, const std::string& what)
      : Error(ErrorKind::PrecisionCapExceeded, what), last_result(std::move(last)), last_bits(bits) {}
  T last_result;
  long last_bits;
};

/// Runs task at initial_bits and doubles the precision until validator passes.
template <class Task, class Validator>
auto with_adaptive_precision(Task&& task, Validator&& validator, long initial_bits,
                             long cap = kDefaultPrecisionCap) {
  using T = decltype(task(PrecisionContext(initial_bits)));
  long bits = initial_bits;
  std::optional<T> last;
  while (true) {
    PrecisionContext ctx(bits);
    last.emplace(task(ctx));
    if (validator(*last, ctx) == Verdict::Pass) return std::move(*last);
    if (bits * 2 > cap)
      throw PrecisionCapError<T>(std::move(*last), bits,
                                 "validator did not pass up to " + std::to_string(bits) + " bits");
    bits *= 2;
  }
}

}  // namespace qlab
