#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qlab/numerics/enclosure.hpp"

namespace qlab {

/// f(x) = 1 - tau + a x^2 - (a + 2 - tau) x^4, written as c0 + y (a - b y) with y = x^2.
/// Parameters are kept as decimal text; derived constants are rounded at construction precision.
class QuarticMap {
 public:
  QuarticMap(std::string a_text, std::string tau_text)
      : a_text_(std::move(a_text)), tau_text_(std::move(tau_text)), bits_(working_bits()),
        a_(a_text_), tau_(tau_text_) {
    require(a_ > 0, ErrorKind::DegenerateParameter, "a must be positive");
    c0_ = 1 - tau_;
    b_ = a_ + 2 - tau_;
    require(b_ > 0, ErrorKind::DegenerateParameter, "a + 2 - tau must be positive");
    lambda_ = 2 * (a_ + 4 - 2 * tau_);
    v_ = c0_ + a_ * a_ / (4 * b_);
    c_plus_ = sqrt(a_ / (2 * b_));
  }
  QuarticMap(const Real& a, const Real& tau) : QuarticMap(a.str(), tau.str()) {}

  /// Same parameters re-rounded at another precision.
  QuarticMap at(PrecisionContext ctx) const {
    PrecisionScope scope(ctx);
    return QuarticMap(a_text_, tau_text_);
  }
  QuarticMap at(long bits) const { return at(PrecisionContext(bits)); }

  const std::string& a_text() const { return a_text_; }
  const std::string& tau_text() const { return tau_text_; }
  long bits() const { return bits_; }

  const Real& a() const { return a_; }
  const Real& tau() const { return tau_; }
  const Real& c0() const { return c0_; }
  const Real& b() const { return b_; }
  const Real& lambda() const { return lambda_; }
  const Real& critical_value() const { return v_; }
  const Real& c_plus() const { return c_plus_; }
  Real c_minus() const { return -c_plus_; }

  Real eval(const Real& x) const {
    Real y = x * x;
    return c0_ + y * (a_ - b_ * y);
  }
  Real deriv(const Real& x) const {
    Real y = x * x;
    return 2 * x * (a_ - 2 * b_ * y);
  }
  Real deriv2(const Real& x) const { return 2 * a_ - 12 * b_ * x * x; }

  /// x <- f(x) without allocating; tmp is scratch.
  void step(Real& x, Real& tmp) const {
    mpfr_sqr(x.raw(), x.raw(), MPFR_RNDN);
    mpfr_mul(tmp.raw(), b_.raw(), x.raw(), MPFR_RNDN);
    mpfr_sub(tmp.raw(), a_.raw(), tmp.raw(), MPFR_RNDN);
    mpfr_mul(x.raw(), x.raw(), tmp.raw(), MPFR_RNDN);
    mpfr_add(x.raw(), x.raw(), c0_.raw(), MPFR_RNDN);
  }

  Real iterate(const Real& x0, long n) const {
    Real x = x0.rounded();
    Real tmp;
    for (long k = 0; k < n; ++k) step(x, tmp);
    return x;
  }

 private:
  std::string a_text_;
  std::string tau_text_;
  long bits_;
  Real a_, tau_, c0_, b_, lambda_, v_, c_plus_;
};

struct CriticalPoints {
  Real c_minus;
  Real zero;
  Real c_plus;
};

inline CriticalPoints critical_points(const QuarticMap& map) {
  require(map.a() > 0, ErrorKind::DegenerateParameter, "a must be positive");
  return {map.c_minus(), Real(0), map.c_plus()};
}

/// Index of the monotone piece containing x: (-inf, c-), [c-, 0), [0, c+), [c+, inf).
inline int branch_of(const QuarticMap& map, const Real& x) {
  if (x < -map.c_plus()) return 0;
  if (x < 0) return 1;
  if (x < map.c_plus()) return 2;
  return 3;
}

/// +1 where f increases on the branch, -1 where it decreases.
inline int branch_sign(int index) { return (index == 0 || index == 2) ? 1 : -1; }

struct MonotoneBranch {
  int index = 0;
  Enclosure domain;
  int sign = 1;
};

/// The four monotone pieces of f restricted to [-R, R].
inline std::array<MonotoneBranch, 4> monotone_branches(const QuarticMap& map, const Real& R) {
  require(R > map.c_plus(), ErrorKind::Precondition, "range must contain both critical points");
  Real cp = map.c_plus();
  return {MonotoneBranch{0, Enclosure(-R, -cp), 1}, MonotoneBranch{1, Enclosure(-cp, Real(0)), -1},
          MonotoneBranch{2, Enclosure(Real(0), cp), 1}, MonotoneBranch{3, Enclosure(cp, R), -1}};
}

/// Closed-form inverse of f on one monotone branch; empty when w is not in the branch image.
inline std::optional<Real> inverse_branch(const QuarticMap& map, int index, const Real& w) {
  Real s = w - map.c0();
  Real disc = map.a() * map.a() - 4 * map.b() * s;
  if (disc < 0) return std::nullopt;
  Real q = map.a() + sqrt(disc);
  if (index == 0 || index == 3) {
    Real y = q / (2 * map.b());
    Real x = sqrt(y);
    return index == 0 ? -x : x;
  }
  if (s < 0) return std::nullopt;
  Real y = 2 * s / q;
  Real x = sqrt(y);
  return index == 1 ? -x : x;
}

struct OrbitPoint {
  Real x;
  double log_deriv = 0;  // ln|Df^k(x0)|
};

struct Orbit {
  std::vector<OrbitPoint> points;
  bool critical_hit = false;       // some step had |Df| below the precision floor
  std::optional<long> escaped_at;  // first k with x_k < -v
  bool diverged = false;           // iteration stopped early once |x| became huge
};

/// Streams x_k, ln|Df^k(x0)| for k = 0..n to visit; stops early if visit returns false.
inline Orbit orbit(const QuarticMap& map, const Real& x0, long n, bool keep_points = true,
                   const std::function<bool(long, const Real&, double)>& visit = {}) {
  Orbit out;
  Real x = x0.rounded();
  Real tmp;
  double acc = 0;
  const long floor_exp = -(working_bits() - 8);
  Real minus_v = -map.critical_value();
  for (long k = 0;; ++k) {
    if (keep_points) out.points.push_back({x, acc});
    if (visit && !visit(k, x, acc)) break;
    if (!out.escaped_at && x < minus_v) out.escaped_at = k;
    if (k == n) break;
    if (mpfr_get_exp(x.raw()) > 4096 && !x.is_zero()) {
      out.diverged = true;
      break;
    }
    Real d = map.deriv(x);
    if (d.is_zero() || mpfr_get_exp(d.raw()) < floor_exp) out.critical_hit = true;
    acc += d.log_abs();
    map.step(x, tmp);
  }
  return out;
}

/// The three components of f^{-1}([-1, 1]) and the two gaps between them.
struct BranchPartition {
  Enclosure I0, V, I1;
  Enclosure G_left, G_right;
};

inline BranchPartition branch_partition(const QuarticMap& map) {
  if (!(map.critical_value() > 1))
    throw Error(ErrorKind::NotThreeComponents, "critical value is not above 1");
  // f(x) = 1  <=>  b y^2 - a y + tau = 0
  Real s = sqrt(map.a() * map.a() - 4 * map.b() * map.tau());
  Real y_plus = (map.a() + s) / (2 * map.b());
  Real y_minus = 2 * map.tau() / (map.a() + s);
  Real outer = sqrt(y_plus);
  Real inner = sqrt(y_minus);
  BranchPartition p;
  p.I0 = Enclosure(Real(-1), -outer);
  p.V = Enclosure(-inner, inner);
  p.I1 = Enclosure(outer, Real(1));
  p.G_left = Enclosure(-outer, -inner);
  p.G_right = Enclosure(inner, outer);
  return p;
}

}  // namespace qlab
