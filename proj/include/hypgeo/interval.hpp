#pragma once

// Closed float intervals with outward rounding by one ulp per operation.
// No rounding-mode switching; every endpoint is nudged with nextafter.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace hypgeo {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr Interval() = default;
  constexpr Interval(double v) : lo(v), hi(v) {}  // NOLINT: implicit from exact values
  constexpr Interval(double l, double h) : lo(l), hi(h) {}

  double mid() const noexcept { return 0.5 * (lo + hi); }
  double width() const noexcept { return hi - lo; }
  bool is_point() const noexcept { return lo == hi; }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  bool overlaps(const Interval& o) const noexcept { return lo <= o.hi && o.lo <= hi; }
};

inline double round_down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
inline double round_up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }

namespace detail {
inline Interval widen(double lo, double hi, bool exact) {
  return exact ? Interval(lo, hi) : Interval(round_down(lo), round_up(hi));
}
inline bool exact_sum(double a, double b, double s) {
  // two-sum error term is zero
  double bb = s - a;
  return (a - (s - bb)) + (b - bb) == 0.0;
}
}  // namespace detail

inline Interval operator-(const Interval& x) { return {-x.hi, -x.lo}; }

inline Interval operator+(const Interval& x, const Interval& y) {
  double lo = x.lo + y.lo, hi = x.hi + y.hi;
  return {detail::exact_sum(x.lo, y.lo, lo) ? lo : round_down(lo),
          detail::exact_sum(x.hi, y.hi, hi) ? hi : round_up(hi)};
}

inline Interval operator-(const Interval& x, const Interval& y) { return x + (-y); }

inline Interval operator*(const Interval& x, const Interval& y) {
  const double a = x.lo * y.lo, b = x.lo * y.hi, c = x.hi * y.lo, d = x.hi * y.hi;
  const double lo = std::min({a, b, c, d}), hi = std::max({a, b, c, d});
  const bool exact = x.is_point() && y.is_point() && std::fma(x.lo, y.lo, -lo) == 0.0;
  return detail::widen(lo, hi, exact);
}

/// Requires 0 outside y.
inline Interval operator/(const Interval& x, const Interval& y) {
  if (y.lo <= 0.0 && y.hi >= 0.0) {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
  const double a = x.lo / y.lo, b = x.lo / y.hi, c = x.hi / y.lo, d = x.hi / y.hi;
  const double lo = std::min({a, b, c, d}), hi = std::max({a, b, c, d});
  const bool exact = x.is_point() && y.is_point() && std::fma(lo, y.lo, -x.lo) == 0.0;
  return detail::widen(lo, hi, exact);
}

/// Natural log; libm is within one ulp, so widen by two.
inline Interval log(const Interval& x) {
  if (x.hi <= 0.0) return {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  const double lo = x.lo <= 0.0 ? -std::numeric_limits<double>::infinity() : round_down(round_down(std::log(x.lo)));
  if (x.is_point() && x.lo == 1.0) return {0.0, 0.0};
  return {lo, round_up(round_up(std::log(x.hi)))};
}

inline Interval exp(const Interval& x) {
  return {std::max(0.0, round_down(round_down(std::exp(x.lo)))), round_up(round_up(std::exp(x.hi)))};
}

inline Interval hull(const Interval& x, const Interval& y) { return {std::min(x.lo, y.lo), std::max(x.hi, y.hi)}; }

inline Interval abs(const Interval& x) {
  if (x.lo >= 0) return x;
  if (x.hi <= 0) return -x;
  return {0.0, std::max(-x.lo, x.hi)};
}

inline std::ostream& operator<<(std::ostream& os, const Interval& x) {
  return os << '[' << x.lo << ", " << x.hi << ']';
}

}  // namespace hypgeo
