#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qlab/family.hpp"

namespace qlab {

struct Complex {
  Real re, im;

  Complex() : re(0), im(0) {}
  Complex(Real r, Real i = Real(0)) : re(std::move(r)), im(std::move(i)) {}

  Complex operator+(const Complex& o) const { return {re + o.re, im + o.im}; }
  Complex operator-(const Complex& o) const { return {re - o.re, im - o.im}; }
  Complex operator-() const { return {-re, -im}; }
  Complex operator*(const Complex& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
  Complex operator*(const Real& s) const { return {re * s, im * s}; }
  Complex operator/(const Complex& o) const {
    Real d = o.re * o.re + o.im * o.im;
    return {(re * o.re + im * o.im) / d, (im * o.re - re * o.im) / d};
  }
  Complex& operator+=(const Complex& o) { return *this = *this + o; }
  Complex& operator-=(const Complex& o) { return *this = *this - o; }
  Complex& operator*=(const Complex& o) { return *this = *this * o; }

  std::complex<long double> approx() const { return {re.to_long_double(), im.to_long_double()}; }
  static Complex from(std::complex<long double> z) { return {Real(z.real()), Real(z.imag())}; }
};

inline Complex conj(const Complex& z) { return {z.re, -z.im}; }
inline Real abs(const Complex& z) {
  Real r;
  mpfr_hypot(r.raw(), z.re.raw(), z.im.raw(), MPFR_RNDN);
  return r;
}

/// f(z) and Df(z) for complex z.
inline Complex eval(const QuarticMap& map, const Complex& z) {
  Complex y = z * z;
  return Complex(map.c0()) + y * (Complex(map.a()) - y * map.b());
}
inline Complex deriv(const QuarticMap& map, const Complex& z) {
  Complex y = z * z;
  return z * (Complex(map.a()) - y * (2 * map.b())) * Real(2);
}

struct ComplexRootResult {
  Complex z;
  Real residual;  // |p(z)|
  Real radius;    // 2|p(z)/p'(z)|, the enclosure half-width
};

namespace detail {
using cld = std::complex<long double>;
using ApproxEval = std::function<std::pair<cld, cld>(cld)>;        // p, p'
using ExactEval = std::function<std::pair<Complex, Complex>(const Complex&)>;

// Simultaneous Aberth iteration in extended precision; the caller polishes and certifies.
inline std::vector<cld> aberth(const ApproxEval& pq, int degree, long double radius, int max_iter = 2000,
                               std::vector<cld> z = {}) {
  const long double two_pi = 6.283185307179586476925286766559L;
  if (z.size() != static_cast<std::size_t>(degree)) {
    z.resize(degree);
    for (int k = 0; k < degree; ++k) z[k] = std::polar(radius, two_pi * k / degree + 0.4L);
  }
  int calm = 0;
  for (int it = 0; it < max_iter && calm < 3; ++it) {
    long double worst = 0;
    for (int i = 0; i < degree; ++i) {
      auto [p, dp] = pq(z[i]);
      if (p == cld(0)) continue;
      cld N = p / dp;
      if (!std::isfinite(N.real()) || !std::isfinite(N.imag())) N = z[i] / static_cast<long double>(degree);
      long double sr = 0, si = 0;
      const long double xr = z[i].real(), xi = z[i].imag();
      for (int j = 0; j < degree; ++j) {
        if (j == i) continue;
        long double dr = xr - z[j].real(), di = xi - z[j].imag();
        long double inv = 1 / (dr * dr + di * di);
        sr += dr * inv;
        si -= di * inv;
      }
      cld S(sr, si);
      cld w = N / (1.0L - N * S);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) w = N;
      z[i] -= w;
      worst = std::max(worst, std::abs(w) / (1 + std::abs(z[i])));
    }
    calm = worst < 1e-17L ? calm + 1 : 0;
  }
  return z;
}

inline ComplexRootResult polish(const ExactEval& pq, const Complex& z0, long bits) {
  Complex z = z0;
  const Real stop = ldexp(Real(1), -(bits - 8));
  Real last_step;
  for (long it = 0; it < 4 * bits + 100; ++it) {
    auto [p, dp] = pq(z);
    if (p.re.is_zero() && p.im.is_zero()) break;
    Complex step = p / dp;
    Real s = abs(step);
    if (!s.is_finite()) break;
    // stop once Newton no longer makes progress (multiple roots converge linearly)
    if (it > 8 && !(s < last_step)) break;
    z -= step;
    last_step = s;
    if (s <= stop * (1 + abs(z))) break;
  }
  auto [p, dp] = pq(z);
  ComplexRootResult out;
  out.z = z;
  out.residual = abs(p);
  Real r = abs(dp);
  out.radius = r.is_zero() ? Real(0) : 2 * out.residual / r;
  return out;
}

inline std::pair<cld, cld> iterate_approx(const QuarticMap& map, long double a, long double b, long double c0,
                                          cld z, int n) {
  (void)map;
  cld d = 1;
  for (int k = 0; k < n; ++k) {
    cld y = z * z;
    d *= 2.0L * z * (a - 2.0L * b * y);
    z = c0 + y * (a - b * y);
  }
  return {z, d};
}

// Starting points for f^n(z) = z: one backward orbit per word over the four complex inverse branches.
inline std::vector<cld> backward_seeds(long double a, long double b, long double c0, int n) {
  int degree = 1;
  for (int k = 0; k < n; ++k) degree *= 4;
  std::vector<cld> out(degree);
  for (int w = 0; w < degree; ++w) {
    cld z = 0.5L;
    for (int sweep = 0; sweep < 6; ++sweep) {
      int code = w;
      for (int k = 0; k < n; ++k, code /= 4) {
        cld root = std::sqrt(a * a - 4.0L * b * (z - c0));
        cld y = (a + ((code & 1) ? -root : root)) / (2.0L * b);
        z = std::sqrt(y);
        if (code & 2) z = -z;
      }
    }
    // nudge off exact symmetry so equal seeds do not stall the iteration
    out[w] = z + cld(1e-9L * (w % 7), 1e-9L * (w % 5));
  }
  return out;
}

inline std::pair<Complex, Complex> iterate_exact(const QuarticMap& map, Complex z, int n) {
  Complex d(Real(1));
  for (int k = 0; k < n; ++k) {
    d *= deriv(map, z);
    z = eval(map, z);
  }
  return {z, d};
}

inline void sort_roots(std::vector<ComplexRootResult>& roots) {
  std::sort(roots.begin(), roots.end(), [](const auto& x, const auto& y) {
    if (x.z.re != y.z.re) return x.z.re < y.z.re;
    return x.z.im < y.z.im;
  });
}
}  // namespace detail

/// Escape radius with |z| > R implying |f(z)| >= 2|z|.
inline Real escape_radius(const QuarticMap& map) {
  Real r = cbrt((abs(map.c0()) + map.a() + 2) / map.b()) + 1;
  return max(Real(2), r);
}

/// The four solutions of f(z) = w, with multiplicity.
inline std::vector<ComplexRootResult> complex_roots(const QuarticMap& map, const Complex& w) {
  long double a = map.a().to_long_double(), b = map.b().to_long_double(), c0 = map.c0().to_long_double();
  detail::cld wl = w.approx();
  auto approx = [&](detail::cld z) {
    detail::cld y = z * z;
    return std::make_pair(c0 + y * (a - b * y) - wl, 2.0L * z * (a - 2.0L * b * y));
  };
  long double radius = std::max(2.0L, std::pow((std::abs(wl) + std::abs(c0) + a) / b, 0.25L) + 1);
  auto z0 = detail::aberth(approx, 4, radius);
  auto exact = [&](const Complex& z) { return std::make_pair(eval(map, z) - w, deriv(map, z)); };
  std::vector<ComplexRootResult> out;
  const Real tol = ldexp(Real(1), -(working_bits() / 2));
  for (const auto& z : z0) {
    auto r = detail::polish(exact, Complex::from(z), working_bits());
    if (!(r.residual <= tol * (1 + abs(w))))
      throw Error(ErrorKind::RootFindingStalled, "preimage root did not converge");
    out.push_back(std::move(r));
  }
  detail::sort_roots(out);
  return out;
}

/// Real coefficients of f^n, lowest degree first.
inline std::vector<Real> iterate_coefficients(const QuarticMap& map, int n) {
  std::vector<Real> P = {Real(0), Real(1)};
  auto mul = [](const std::vector<Real>& x, const std::vector<Real>& y) {
    std::vector<Real> z(x.size() + y.size() - 1, Real(0));
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].is_zero()) continue;
      for (std::size_t j = 0; j < y.size(); ++j) z[i + j] += x[i] * y[j];
    }
    return z;
  };
  for (int k = 0; k < n; ++k) {
    auto P2 = mul(P, P);
    auto P4 = mul(P2, P2);
    std::vector<Real> next(P4.size(), Real(0));
    next[0] = map.c0();
    for (std::size_t i = 0; i < P2.size(); ++i) next[i] += map.a() * P2[i];
    for (std::size_t i = 0; i < P4.size(); ++i) next[i] -= map.b() * P4[i];
    P = std::move(next);
  }
  return P;
}

/// max_k |c_k - e_k| / max_k |e_k| between the monic product of (z - r) and the monic expansion of f^n(z) - z.
inline double backward_error(const QuarticMap& map, int n, const std::vector<Complex>& roots) {
  auto P = iterate_coefficients(map, n);
  P[1] -= 1;
  Real lead = P.back();
  std::vector<Complex> c = {Complex(Real(1))};
  for (const auto& r : roots) {
    std::vector<Complex> next(c.size() + 1);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= c[i] * r;
    }
    c = std::move(next);
  }
  require(c.size() == P.size(), ErrorKind::Precondition, "root count does not match the degree");
  Real num(0), den(0);
  for (std::size_t k = 0; k < P.size(); ++k) {
    Real e = P[k] / lead;
    num = max(num, abs(c[k] - Complex(e)));
    den = max(den, abs(e));
  }
  return (num / den).to_double();
}

struct ComplexPeriodicRoot {
  ComplexRootResult root;
  Real log_multiplier;  // ln|Df^least_period(z)|
  int least_period = 0;
  double lyapunov = 0;
  bool repelling = false;
};

struct ComplexSpectrum {
  std::map<int, std::vector<ComplexPeriodicRoot>> by_period;  // all 4^n roots of f^n(z) = z
  std::map<int, double> backward_error;
  double chi_per_complex = INFINITY;
};

inline constexpr int kComplexPeriodCap = 6;

/// All roots of f^n(z) - z for n <= max_period, with least periods and multipliers.
inline ComplexSpectrum complex_periodic_spectrum(const QuarticMap& map, int max_period,
                                                 int period_cap = kComplexPeriodCap) {
  require(max_period >= 1 && max_period <= period_cap, ErrorKind::Precondition,
          "max_period must lie in [1, " + std::to_string(period_cap) + "]");
  const long bits = working_bits();
  const Real tol = ldexp(Real(1), -(bits / 2));
  long double a = map.a().to_long_double(), b = map.b().to_long_double(), c0 = map.c0().to_long_double();
  long double R = escape_radius(map).to_long_double();

  ComplexSpectrum out;
  for (int n = 1; n <= max_period; ++n) {
    int degree = 1;
    for (int k = 0; k < n; ++k) degree *= 4;
    auto approx = [&](detail::cld z) {
      auto [w, d] = detail::iterate_approx(map, a, b, c0, z, n);
      return std::make_pair(w - z, d - 1.0L);
    };
    // coefficient reconstruction loses about degree/4 bits, so roots are polished with headroom
    const long hp = bits + degree / 2 + 64;
    PrecisionScope scope(hp);
    const QuarticMap hmap = map.at(hp);
    auto exact = [&](const Complex& z) {
      auto [w, d] = detail::iterate_exact(hmap, z, n);
      return std::make_pair(w - z, d - Complex(Real(1)));
    };
    auto z0 = detail::aberth(approx, degree, R, 2000, detail::backward_seeds(a, b, c0, n));
    std::vector<ComplexRootResult> roots;
    for (const auto& z : z0) {
      auto r = detail::polish(exact, Complex::from(z), hp);
      if (!(r.residual <= tol))
        throw Error(ErrorKind::RootFindingStalled, "period-" + std::to_string(n) + " root did not converge");
      roots.push_back(std::move(r));
    }
    detail::sort_roots(roots);
    for (std::size_t i = 1; i < roots.size(); ++i)
      for (std::size_t j = i; j-- > 0 && roots[i].z.re - roots[j].z.re <= tol;)
        if (abs(roots[i].z - roots[j].z) <= tol)
          throw Error(ErrorKind::RootFindingStalled,
                      "two approximations met the same period-" + std::to_string(n) + " root");

    std::vector<Complex> zs;
    for (const auto& r : roots) zs.push_back(r.z);
    out.backward_error[n] = backward_error(hmap, n, zs);

    auto& level = out.by_period[n];
    for (auto& r : roots) {
      ComplexPeriodicRoot pr;
      pr.least_period = n;
      for (int d = 1; d < n && pr.least_period == n; ++d) {
        if (n % d) continue;
        for (const auto& q : out.by_period[d])
          if (q.least_period == d && abs(q.root.z - r.z) <= tol) {
            pr.least_period = d;
            break;
          }
      }
      pr.log_multiplier = log(abs(detail::iterate_exact(hmap, r.z, pr.least_period).second));
      pr.lyapunov = pr.log_multiplier.to_double() / pr.least_period;
      pr.repelling = pr.log_multiplier.is_finite() && pr.log_multiplier > Real(std::log1p(1e-12));
      if (pr.repelling) out.chi_per_complex = std::min(out.chi_per_complex, pr.lyapunov);
      pr.root = std::move(r);
      level.push_back(std::move(pr));
    }
  }
  return out;
}

struct CriticalEscapeReport {
  std::vector<Complex> critical_points;  // 0, c_-, c_+
  bool all_real = true;
  Real radius;
  long escape_time = -1;  // first k with |f^k(c_+)| > radius
  std::vector<Real> orbit;
};

/// Iterates the outer critical points until they pass the escape radius.
inline CriticalEscapeReport critical_escape(const QuarticMap& map, long budget = 10000) {
  require(map.critical_value() > 1, ErrorKind::Precondition, "critical value must exceed 1");
  CriticalEscapeReport out;
  out.critical_points = {Complex(Real(0)), Complex(map.c_minus()), Complex(map.c_plus())};
  for (const auto& c : out.critical_points) out.all_real = out.all_real && c.im.is_zero();
  out.radius = escape_radius(map);
  Real x = map.c_plus(), tmp;
  for (long k = 0; k <= budget; ++k) {
    out.orbit.push_back(x);
    if (abs(x) > out.radius) {
      out.escape_time = k;
      return out;
    }
    map.step(x, tmp);
  }
  throw Error(ErrorKind::NoEscapeWithinBudget, "c_+ did not escape within " + std::to_string(budget) + " steps");
}

}  // namespace qlab
