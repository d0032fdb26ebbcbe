#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qlab/family.hpp"

namespace qlab {

struct PullbackComponent {
  Enclosure interval;
  int depth = 0;
  std::vector<int> itinerary;  // branch of x, f(x), ..., f^{depth-1}(x) for x the midpoint
  bool touches_critical = false;
};

struct PullbackResult {
  std::vector<PullbackComponent> components;
  bool truncated = false;
};

struct RateSample {
  int n = 0;
  Real max_len;
  double log_rate = 0;  // ln(max_len) / n
};

struct RateSeries {
  std::vector<RateSample> samples;
  bool truncated = false;
  double limsup_estimate = 0;  // max of log_rate over the tail window
  double liminf_estimate = 0;  // min of log_rate over the tail window
};

/// Default range [-R, R] with R = 1 + v.
inline Enclosure default_range(const QuarticMap& map) {
  Real R = 1 + map.critical_value();
  return Enclosure(-R, R);
}

/// Image interval of one monotone branch restricted to [-R, R].
inline Enclosure branch_image(const QuarticMap& map, int index, const Real& R) {
  if (index == 1 || index == 2) return Enclosure(map.c0(), map.critical_value());
  return Enclosure(map.eval(R), map.critical_value());
}

/// f|_branch^{-1}(J intersected with the branch image), or empty.
inline std::optional<Enclosure> branch_preimage(const QuarticMap& map, const MonotoneBranch& branch,
                                                const Enclosure& J) {
  Real img_lo = map.eval(branch.sign > 0 ? branch.domain.lo : branch.domain.hi);
  Real img_hi = map.eval(branch.sign > 0 ? branch.domain.hi : branch.domain.lo);
  if (branch.index == 1 || branch.index == 2) img_lo = map.c0();
  if (branch.index == 0 || branch.index == 3) img_hi = map.critical_value();
  Real lo = max(J.lo, img_lo);
  Real hi = min(J.hi, img_hi);
  if (lo > hi) return std::nullopt;
  auto p = inverse_branch(map, branch.index, lo);
  auto q = inverse_branch(map, branch.index, hi);
  if (!p || !q) return std::nullopt;
  if (branch.sign < 0) std::swap(p, q);
  // keep clipped endpoints exactly on the domain boundary
  Real plo = max(*p, branch.domain.lo);
  Real phi = min(*q, branch.domain.hi);
  if (plo > phi) return std::nullopt;
  return Enclosure(plo, phi);
}

/// Components of f^{-1}(W) inside [-R, R], merged symbolically across shared critical points.
inline std::vector<PullbackComponent> pullback_once(const QuarticMap& map, const PullbackComponent& W,
                                                    const Real& R) {
  auto branches = monotone_branches(map, R);
  std::array<std::optional<Enclosure>, 4> piece;
  for (int i = 0; i < 4; ++i) piece[i] = branch_preimage(map, branches[i], W.interval);

  const Real& v = map.critical_value();
  bool contains_v = W.interval.contains(v);
  std::array<bool, 3> joins = {contains_v, W.interval.contains(map.c0()), contains_v};

  std::vector<PullbackComponent> out;
  int i = 0;
  while (i < 4) {
    if (!piece[i]) {
      ++i;
      continue;
    }
    Real lo = piece[i]->lo;
    Real hi = piece[i]->hi;
    bool merged = false;
    int j = i;
    while (j + 1 < 4 && joins[j] && piece[j + 1]) {
      hi = piece[j + 1]->hi;
      merged = true;
      ++j;
    }
    PullbackComponent c;
    c.interval = Enclosure(lo, hi);
    c.depth = W.depth + 1;
    c.touches_critical = W.touches_critical || merged;
    Real m = c.interval.mid();
    c.itinerary.reserve(W.itinerary.size() + 1);
    c.itinerary.push_back(branch_of(map, m));
    c.itinerary.insert(c.itinerary.end(), W.itinerary.begin(), W.itinerary.end());
    out.push_back(std::move(c));
    i = j + 1;
  }
  return out;
}

namespace detail {
inline void sort_by_left(std::vector<PullbackComponent>& comps) {
  std::sort(comps.begin(), comps.end(),
            [](const PullbackComponent& x, const PullbackComponent& y) { return x.interval.lo < y.interval.lo; });
}

/// Keeps the cap largest components (ties broken by position), then restores left-to-right order.
inline bool keep_largest(std::vector<PullbackComponent>& comps, std::size_t cap) {
  if (comps.size() <= cap) return false;
  std::stable_sort(comps.begin(), comps.end(), [](const PullbackComponent& x, const PullbackComponent& y) {
    return x.interval.width() > y.interval.width();
  });
  comps.resize(cap);
  sort_by_left(comps);
  return true;
}
}  // namespace detail

inline constexpr std::size_t kDefaultComponentCap = 1000000;

/// All components of f^{-n}(J) inside range, built level by level.
inline PullbackResult preimage_components(const QuarticMap& map, const Enclosure& J, int n,
                                          const Enclosure& range, std::size_t cap = kDefaultComponentCap) {
  require(n >= 0, ErrorKind::Precondition, "negative depth");
  require(!(J.hi < J.lo), ErrorKind::Precondition, "empty J");
  Real R = max(abs(range.lo), abs(range.hi));
  PullbackResult res;
  res.components.push_back(PullbackComponent{J, 0, {}, false});
  for (int k = 0; k < n; ++k) {
    std::vector<PullbackComponent> next;
    for (const auto& W : res.components) {
      auto parts = pullback_once(map, W, R);
      for (auto& p : parts) {
        if (p.interval.hi < range.lo || p.interval.lo > range.hi) continue;
        next.push_back(std::move(p));
      }
      if (next.size() > cap) break;
    }
    detail::sort_by_left(next);
    if (next.size() > cap) {
      next.resize(cap);
      res.truncated = true;
    }
    res.components = std::move(next);
    if (res.truncated) break;
  }
  return res;
}

/// Max component length of f^{-n}(J) for n = 1..n_max. Past cap components only the cap largest
/// are carried to the next level and the series is flagged truncated.
inline RateSeries shrink_rate_series(const QuarticMap& map, const Enclosure& J, int n_max, const Enclosure& range,
                                     std::size_t cap = 4096, int tail_window = 10) {
  require(n_max >= 1, ErrorKind::Precondition, "n_max must be at least 1");
  require(J.width() > 0, ErrorKind::Precondition, "J has zero width");
  Real R = max(abs(range.lo), abs(range.hi));
  RateSeries out;
  std::vector<PullbackComponent> level{PullbackComponent{J, 0, {}, false}};
  for (int n = 1; n <= n_max; ++n) {
    std::vector<PullbackComponent> next;
    for (const auto& W : level) {
      for (auto& p : pullback_once(map, W, R)) {
        if (p.interval.hi < range.lo || p.interval.lo > range.hi) continue;
        p.itinerary.clear();
        next.push_back(std::move(p));
      }
    }
    detail::sort_by_left(next);
    if (detail::keep_largest(next, cap)) out.truncated = true;
    if (next.empty()) break;
    Real best = next.front().interval.width();
    for (const auto& c : next)
      if (c.interval.width() > best) best = c.interval.width();
    out.samples.push_back(RateSample{n, best, best.log_abs() / n});
    level = std::move(next);
  }
  if (!out.samples.empty()) {
    std::size_t start = out.samples.size() > static_cast<std::size_t>(tail_window)
                            ? out.samples.size() - tail_window : 0;
    out.limsup_estimate = -INFINITY;
    out.liminf_estimate = INFINITY;
    for (std::size_t i = start; i < out.samples.size(); ++i) {
      out.limsup_estimate = std::max(out.limsup_estimate, out.samples[i].log_rate);
      out.liminf_estimate = std::min(out.liminf_estimate, out.samples[i].log_rate);
    }
  }
  return out;
}

/// Pull J back along an itinerary (itinerary[0] is the branch of the deepest point).
inline Enclosure diffeo_pullback(const QuarticMap& map, const Enclosure& J, const std::vector<int>& itinerary) {
  Enclosure W = J;
  for (std::size_t k = itinerary.size(); k-- > 0;) {
    int i = itinerary[k];
    require(i >= 0 && i < 4, ErrorKind::Precondition, "branch index out of range");
    if (W.hi > map.critical_value())
      throw Error(ErrorKind::NotDiffeomorphic, "step " + std::to_string(k) + " straddles a critical point");
    if ((i == 1 || i == 2) && W.lo < map.c0())
      throw Error(ErrorKind::NotDiffeomorphic, "step " + std::to_string(k) + " straddles the critical point 0");
    auto p = inverse_branch(map, i, W.lo);
    auto q = inverse_branch(map, i, W.hi);
    if (!p || !q) throw Error(ErrorKind::NotDiffeomorphic, "step " + std::to_string(k) + " leaves the branch image");
    if (branch_sign(i) < 0) std::swap(p, q);
    W = Enclosure(*p, *q);
  }
  return W;
}

/// Endpoints plus Chebyshev-Lobatto interior points of an interval.
inline std::vector<Real> lobatto_points(const Enclosure& W, int count) {
  require(count >= 2, ErrorKind::Precondition, "need at least two sample points");
  std::vector<Real> pts;
  pts.reserve(count);
  Real m = W.mid();
  Real h = ldexp(W.hi - W.lo, -1);
  Real p = pi();
  pts.push_back(W.lo);
  for (int k = 1; k + 1 < count; ++k) pts.push_back(m - h * cos(p * k / (count - 1)));
  pts.push_back(W.hi);
  return pts;
}

/// ln|Df^n(x)| by accumulation along the orbit.
inline double log_deriv_iterate(const QuarticMap& map, const Real& x0, long n) {
  Real x = x0.rounded();
  Real tmp;
  double acc = 0;
  for (long k = 0; k < n; ++k) {
    acc += map.deriv(x).log_abs();
    map.step(x, tmp);
  }
  return acc;
}

struct DistortionResult {
  double log_distortion = 0;
  double distortion = 1;
  Enclosure pullback;
};

/// Max ratio |Df^n(x)| / |Df^n(x')| over sampled x, x' in the pull-back of J along itinerary.
inline DistortionResult distortion(const QuarticMap& map, const Enclosure& J, const std::vector<int>& itinerary,
                                   int samples = 64) {
  DistortionResult out;
  out.pullback = diffeo_pullback(map, J, itinerary);
  if (itinerary.empty()) return out;
  double lo = INFINITY, hi = -INFINITY;
  for (const Real& x : lobatto_points(out.pullback, samples)) {
    double d = log_deriv_iterate(map, x, static_cast<long>(itinerary.size()));
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  out.log_distortion = hi - lo;
  out.distortion = std::exp(out.log_distortion);
  return out;
}

/// Component of f^{-n}(W) containing x, following the forward orbit of x.
/// orbit_pts[k] must be f^k(x) for k < n, and f^n(x) must lie in W.
inline PullbackComponent pullback_containing(const QuarticMap& map, const Enclosure& W,
                                             const std::vector<Real>& orbit_pts, long n, const Real& R) {
  require(static_cast<long>(orbit_pts.size()) >= n, ErrorKind::Precondition, "orbit too short");
  PullbackComponent cur{W, 0, {}, false};
  for (long k = n; k-- > 0;) {
    auto parts = pullback_once(map, cur, R);
    const Real& x = orbit_pts[k];
    const PullbackComponent* hit = nullptr;
    for (const auto& p : parts)
      if (p.interval.contains(x)) hit = &p;
    if (!hit) {
      // rounding may leave x a hair outside; take the nearest component
      Real best_d;
      for (const auto& p : parts) {
        Real d = x < p.interval.lo ? p.interval.lo - x : x - p.interval.hi;
        if (!hit || d < best_d) {
          hit = &p;
          best_d = d;
        }
      }
    }
    require(hit != nullptr, ErrorKind::Precondition, "orbit point has no preimage component");
    PullbackComponent next = *hit;
    next.itinerary.clear();
    next.itinerary.push_back(branch_of(map, x));
    next.itinerary.insert(next.itinerary.end(), cur.itinerary.begin(), cur.itinerary.end());
    cur = std::move(next);
  }
  return cur;
}

}  // namespace qlab
