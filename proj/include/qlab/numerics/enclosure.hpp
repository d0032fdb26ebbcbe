#pragma once

#include <string>

#include "qlab/numerics/real.hpp"

namespace qlab {

/// Closed interval [lo, hi] computed at a stated precision.
struct Enclosure {
  Real lo;
  Real hi;
  long bits = 0;

  Enclosure() : bits(working_bits()) {}
  Enclosure(Real l, Real h) : lo(std::move(l)), hi(std::move(h)), bits(working_bits()) {
    require(!(hi < lo), ErrorKind::Precondition, "enclosure with hi < lo");
  }
  Enclosure(Real l, Real h, long b) : lo(std::move(l)), hi(std::move(h)), bits(b) {
    require(!(hi < lo), ErrorKind::Precondition, "enclosure with hi < lo");
  }
  static Enclosure point(const Real& x) { return Enclosure(x, x); }

  Real width() const { return hi - lo; }
  Real mid() const {
    Real m = ldexp(lo + hi, -1);
    if (m < lo) return lo;
    if (m > hi) return hi;
    return m;
  }
  bool contains(const Real& x) const { return !(x < lo) && !(x > hi); }
  bool contains(const Enclosure& o) const { return !(o.lo < lo) && !(o.hi > hi); }
  bool overlaps(const Enclosure& o) const { return !(o.hi < lo) && !(o.lo > hi); }
  bool is_point() const { return lo == hi; }

  std::string str(std::size_t digits = 0) const { return "[" + lo.str(digits) + ", " + hi.str(digits) + "]"; }
};

inline Enclosure hull(const Enclosure& a, const Enclosure& b) {
  return Enclosure(min(a.lo, b.lo), max(a.hi, b.hi), std::min(a.bits, b.bits));
}

}  // namespace qlab
