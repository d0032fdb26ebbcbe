#pragma once

#include <mpfr.h>

#include <cctype>
#include <cmath>
#include <compare>
#include <cstdlib>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

#include "qlab/numerics/error.hpp"

namespace qlab {

/// Binary mantissa precision applied to every Real created while it is active.
struct PrecisionContext {
  long bits = 256;

  PrecisionContext() = default;
  explicit PrecisionContext(long b) : bits(b) {
    require(b >= 64, ErrorKind::Precondition, "precision below 64 bits");
  }
  PrecisionContext doubled() const { return PrecisionContext(bits * 2); }
  bool operator==(const PrecisionContext&) const = default;
};

namespace detail {
inline thread_local long tls_working_bits = 256;
}

inline long working_bits() { return detail::tls_working_bits; }

/// RAII: sets the working precision for the current thread.
class PrecisionScope {
 public:
  explicit PrecisionScope(PrecisionContext ctx) : previous_(detail::tls_working_bits) {
    detail::tls_working_bits = ctx.bits;
  }
  explicit PrecisionScope(long bits) : PrecisionScope(PrecisionContext(bits)) {}
  ~PrecisionScope() { detail::tls_working_bits = previous_; }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  long previous_;
};

class Real {
 public:
  Real() {
    mpfr_init2(v_, working_bits());
    mpfr_set_zero(v_, 1);
  }
  Real(int x) : Real() { mpfr_set_si(v_, x, MPFR_RNDN); }
  Real(long x) : Real() { mpfr_set_si(v_, x, MPFR_RNDN); }
  Real(long long x) : Real() { mpfr_set_si(v_, static_cast<long>(x), MPFR_RNDN); }
  Real(unsigned long x) : Real() { mpfr_set_ui(v_, x, MPFR_RNDN); }
  Real(double x) : Real() { mpfr_set_d(v_, x, MPFR_RNDN); }
  Real(long double x) : Real() { mpfr_set_ld(v_, x, MPFR_RNDN); }
  explicit Real(std::string_view text) : Real() {
    std::string s(text);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t start = 0;
    while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
    s = s.substr(start);
    if (s.empty() || mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0)
      throw Error(ErrorKind::Format, "not a decimal number: '" + s + "'");
  }
  explicit Real(const char* text) : Real(std::string_view(text)) {}
  explicit Real(const std::string& text) : Real(std::string_view(text)) {}

  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  /// Copy rounded to the current working precision.
  Real rounded() const {
    Real r;
    mpfr_set(r.v_, v_, MPFR_RNDN);
    return r;
  }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }
  long precision() const { return static_cast<long>(mpfr_get_prec(v_)); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long double to_long_double() const { return mpfr_get_ld(v_, MPFR_RNDN); }
  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }

  /// Natural log of |x| as a double; safe far outside the double exponent range.
  double log_abs() const {
    if (is_zero()) return -INFINITY;
    if (!is_finite()) return INFINITY;
    long e = 0;
    double m = mpfr_get_d_2exp(&e, v_, MPFR_RNDN);
    return std::log(std::fabs(m)) + static_cast<double>(e) * std::log(2.0);
  }

  /// Scientific decimal string with the given number of significant digits (0 = enough to read back exactly).
  std::string str(std::size_t digits = 0) const {
    if (is_zero()) return "0";
    if (!is_finite()) return mpfr_nan_p(v_) ? "nan" : (sign() > 0 ? "inf" : "-inf");
    mpfr_exp_t e = 0;
    char* raw_digits = mpfr_get_str(nullptr, &e, 10, digits, v_, MPFR_RNDN);
    std::string d(raw_digits);
    mpfr_free_str(raw_digits);
    std::string out;
    if (!d.empty() && d[0] == '-') {
      out.push_back('-');
      d.erase(0, 1);
    }
    while (d.size() > 1 && d.back() == '0') d.pop_back();
    out.push_back(d[0]);
    if (d.size() > 1) {
      out.push_back('.');
      out.append(d, 1, std::string::npos);
    }
    long exp10 = static_cast<long>(e) - 1;
    if (exp10 != 0) out += "e" + std::to_string(exp10);
    return out;
  }

  static std::size_t decimal_digits(long bits) {
    return static_cast<std::size_t>(std::ceil(static_cast<double>(bits) * 0.30102999566398120)) + 2;
  }

  Real& operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(long o) { mpfr_mul_si(v_, v_, o, MPFR_RNDN); return *this; }
  Real& operator/=(long o) { mpfr_div_si(v_, v_, o, MPFR_RNDN); return *this; }

  Real operator-() const {
    Real r;
    mpfr_neg(r.v_, v_, MPFR_RNDN);
    return r;
  }

  friend Real operator+(const Real& a, const Real& b) { Real r; mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Real operator-(const Real& a, const Real& b) { Real r; mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Real operator*(const Real& a, const Real& b) { Real r; mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Real operator/(const Real& a, const Real& b) { Real r; mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Real operator+(const Real& a, long b) { Real r; mpfr_add_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
  friend Real operator+(long b, const Real& a) { return a + b; }
  friend Real operator-(const Real& a, long b) { Real r; mpfr_sub_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
  friend Real operator-(long b, const Real& a) { Real r; mpfr_si_sub(r.v_, b, a.v_, MPFR_RNDN); return r; }
  friend Real operator*(const Real& a, long b) { Real r; mpfr_mul_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
  friend Real operator*(long b, const Real& a) { return a * b; }
  friend Real operator/(const Real& a, long b) { Real r; mpfr_div_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
  friend Real operator/(long b, const Real& a) { Real r; mpfr_si_div(r.v_, b, a.v_, MPFR_RNDN); return r; }
  friend Real operator+(const Real& a, int b) { return a + static_cast<long>(b); }
  friend Real operator+(int b, const Real& a) { return a + static_cast<long>(b); }
  friend Real operator-(const Real& a, int b) { return a - static_cast<long>(b); }
  friend Real operator-(int b, const Real& a) { return static_cast<long>(b) - a; }
  friend Real operator*(const Real& a, int b) { return a * static_cast<long>(b); }
  friend Real operator*(int b, const Real& a) { return a * static_cast<long>(b); }
  friend Real operator/(const Real& a, int b) { return a / static_cast<long>(b); }
  friend Real operator/(int b, const Real& a) { return static_cast<long>(b) / a; }

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b) {
    if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
    int c = mpfr_cmp(a.v_, b.v_);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }
  friend bool operator==(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) == 0; }
  friend std::partial_ordering operator<=>(const Real& a, long b) {
    int c = mpfr_cmp_si(a.v_, b);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }
  friend bool operator==(const Real& a, int b) { return a == static_cast<long>(b); }
  friend std::partial_ordering operator<=>(const Real& a, int b) { return a <=> static_cast<long>(b); }

  friend std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.str(); }

 private:
  mpfr_t v_;
};

inline Real sqrt(const Real& x) { Real r; mpfr_sqrt(r.raw(), x.raw(), MPFR_RNDN); return r; }
inline Real cbrt(const Real& x) { Real r; mpfr_cbrt(r.raw(), x.raw(), MPFR_RNDN); return r; }
inline Real abs(const Real& x) { Real r; mpfr_abs(r.raw(), x.raw(), MPFR_RNDN); return r; }
inline Real sqr(const Real& x) { Real r; mpfr_sqr(r.raw(), x.raw(), MPFR_RNDN); return r; }
inline Real log(const Real& x) { Real r; mpfr_log(r.raw(), x.raw(), MPFR_RNDN); return r; }
inline Real exp(const Real& x) { Real r; mpfr_exp(r.raw(), x.raw(), MPFR_RNDN); return r; }
inline Real cos(const Real& x) { Real r; mpfr_cos(r.raw(), x.raw(), MPFR_RNDN); return r; }
inline Real sin(const Real& x) { Real r; mpfr_sin(r.raw(), x.raw(), MPFR_RNDN); return r; }
inline Real pow(const Real& x, const Real& y) { Real r; mpfr_pow(r.raw(), x.raw(), y.raw(), MPFR_RNDN); return r; }
inline Real pow(const Real& x, long n) { Real r; mpfr_pow_si(r.raw(), x.raw(), n, MPFR_RNDN); return r; }
inline Real min(const Real& x, const Real& y) { return x < y ? x : y; }
inline Real max(const Real& x, const Real& y) { return x < y ? y : x; }
inline Real ldexp(const Real& x, long e) { Real r; mpfr_mul_2si(r.raw(), x.raw(), e, MPFR_RNDN); return r; }
inline Real pi() { Real r; mpfr_const_pi(r.raw(), MPFR_RNDN); return r; }

/// 2^{1-bits}: relative rounding unit at the working precision.
inline Real epsilon() { return ldexp(Real(1), 1 - working_bits()); }

}  // namespace qlab
