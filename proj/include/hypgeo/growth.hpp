#pragma once

// Exponential growth rates, Manhattan curves theta_{phi/psi}(t), and the mean
// distortion tau(phi/psi) by class averaging and by the slope -theta'(0).
//
// Counting functions are sampled on a grid T_j = L_top + h/2 - j h below the
// top value level L_top, with h the largest gap between consecutive levels, so
// no grid point sits on a level. Rates are least-squares slopes of log F(T)
// over the upper half of the grid; brackets are [min - spread, max + spread]
// of the successive slopes there, where spread = max - min.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hypgeo/enumerate.hpp"
#include "hypgeo/green.hpp"
#include "hypgeo/length.hpp"
#include "hypgeo/moduli.hpp"
#include "hypgeo/parallel.hpp"
#include "hypgeo/potential.hpp"

namespace hypgeo {

struct GrowthEstimate {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double Tmax = 0.0;  // largest threshold actually used
  bool heuristic = false;
  std::size_t grid_points = 0;

  double width() const { return upper - lower; }
  bool contains(double v) const { return lower <= v && v <= upper; }
};

struct GrowthOptions {
  int radius = -1;  // ball radius for potentials without a counting hook; -1 derives it
};

namespace detail {

struct SlopeFit {
  double point = 0.0, lower = 0.0, upper = 0.0;
};

/// Least-squares slope of y over the upper half of increasing x, with the
/// successive-slope bracket.
inline SlopeFit fit_upper_half(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 4) throw InvalidArgument("growth fit needs at least 4 grid points below the threshold");
  const std::size_t first = std::min(n / 2, n - 3);
  CompensatedSum sx, sy;
  const double m = static_cast<double>(n - first);
  for (std::size_t i = first; i < n; ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / m, my = sy.value() / m;
  CompensatedSum sxy, sxx;
  for (std::size_t i = first; i < n; ++i) {
    sxy.add((x[i] - mx) * (y[i] - my));
    sxx.add((x[i] - mx) * (x[i] - mx));
  }
  SlopeFit f;
  f.point = sxy.value() / sxx.value();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = first + 1; i < n; ++i) {
    const double s = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  const double spread = hi - lo;
  f.lower = std::min(lo - spread, f.point);
  f.upper = std::max(hi + spread, f.point);
  return f;
}

/// Grid of thresholds, increasing, from sorted distinct levels.
inline std::vector<double> level_grid(const std::vector<double>& levels) {
  if (levels.size() < 4) throw InvalidArgument("fewer than 4 distinct value levels below the threshold");
  double h = 0.0;
  for (std::size_t i = 1; i < levels.size(); ++i) h = std::max(h, levels[i] - levels[i - 1]);
  h = std::max(h, (levels.back() - levels.front()) / 64.0);
  std::vector<double> grid;
  for (double T = levels.back() + h / 2; T > levels.front(); T -= h) grid.push_back(T);
  std::reverse(grid.begin(), grid.end());
  return grid;
}

/// Sorted values psi(o, g) < tmax with multiplicities.
struct ValueLevels {
  LevelCounts counts;
  double tmax = 0.0;
  bool heuristic = false;
};

inline int covering_radius(double tmax, double kappa) {
  return std::max(0, static_cast<int>(std::ceil(tmax / kappa - 1e-12)) - 1);
}

inline int cached_radius(const MetricPotential& psi) {
  if (const auto* g = as_green(psi)) return g->table().radius;
  if (const auto* terms = psi.impl().terms()) {
    int r = std::numeric_limits<int>::max();
    for (const Term& t : *terms) {
      const int rt = cached_radius(*t.base);
      if (rt >= 0) r = std::min(r, rt);
    }
    return r == std::numeric_limits<int>::max() ? -1 : r;
  }
  return -1;
}

/// Ball radius whose elements include every g with psi(o, g) < tmax, and the
/// threshold actually covered.
inline std::pair<int, double> ball_for_threshold(const MetricPotential& psi, double tmax, int radius, bool* heuristic) {
  const double kappa = psi.impl().lipschitz_lower();
  if (radius < 0 && kappa > 0) return {covering_radius(tmax, kappa), tmax};
  if (radius < 0) radius = cached_radius(psi);
  if (radius < 0)
    throw InvalidArgument("potential " + psi.name() + " has no lower Lipschitz constant; give a ball radius");
  if (kappa > 0 && covering_radius(tmax, kappa) <= radius) return {radius, tmax};
  // values beyond the ball are assumed to be at least the sphere minimum
  auto vals = psi.impl().ball(radius);
  const auto begin = static_cast<std::size_t>(ball_size(psi.rank(), radius - 1));
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = begin; i < vals->lo.size(); ++i) m = std::min(m, vals->lo[i]);
  *heuristic = true;
  return {radius, std::min(tmax, m)};
}

inline ValueLevels value_levels(const MetricPotential& psi, double tmax, int radius) {
  ValueLevels out;
  out.tmax = tmax;
  if (radius < 0)
    if (auto lc = psi.impl().levels(tmax)) {
      out.counts = std::move(*lc);
      return out;
    }
  const auto [r, t] = ball_for_threshold(psi, tmax, radius, &out.heuristic);
  out.tmax = t;
  auto vals = psi.impl().ball(r);
  std::vector<double> v;
  for (std::size_t i = 0; i < vals->lo.size(); ++i)
    if (vals->mid(i) < t) v.push_back(vals->mid(i));
  std::sort(v.begin(), v.end());
  for (double x : v) {
    if (out.counts.levels.empty() || out.counts.levels.back() != x) {
      out.counts.levels.push_back(x);
      out.counts.counts.push_back(0);
    }
    ++out.counts.counts.back();
  }
  return out;
}

}  // namespace detail

/// v_psi from N(T) = #{g : psi(o, g) < T}.
inline GrowthEstimate growth_rate(const MetricPotential& psi, double Tmax, const GrowthOptions& opt = {}) {
  require(Tmax > 0, "Tmax must be positive");
  const auto lv = detail::value_levels(psi, Tmax, opt.radius);
  const auto& L = lv.counts.levels;
  const auto grid = detail::level_grid(L);
  std::vector<double> logn;
  std::size_t k = 0;
  double n = 0.0;
  for (double T : grid) {
    while (k < L.size() && L[k] < T) n += static_cast<double>(lv.counts.counts[k++]);
    logn.push_back(std::log(n));
  }
  const auto f = detail::fit_upper_half(grid, logn);
  GrowthEstimate g;
  g.point = f.point;
  g.lower = f.lower;
  g.upper = f.upper;
  g.Tmax = lv.tmax;
  g.heuristic = lv.heuristic;
  g.grid_points = grid.size();
  return g;
}

struct Normalized {
  PotentialPtr potential;
  double factor = 1.0;  // potential = factor * input
  GrowthEstimate growth;
};

/// psi scaled to growth rate 1 by the point estimate of v_psi.
inline Normalized normalize(const PotentialPtr& psi, double Tmax, const GrowthOptions& opt = {}) {
  Normalized n;
  n.growth = growth_rate(*psi, Tmax, opt);
  n.factor = n.growth.point;
  n.potential = scaled(psi, n.factor);
  return n;
}

// --- Manhattan curves -----------------------------------------------------------------

/// Values (psi(o,g), phi(o,g)) for all g with psi(o,g) < Tmax, sorted by psi.
struct JointTable {
  std::vector<double> psi, phi;
  std::vector<double> grid;
  double Tmax = 0.0;
  bool heuristic = false;
  double count_rate = 0.0;  // growth point of the plain count
  double top_ratio = 0.0;   // sum phi / sum psi over the upper half of psi values
};

inline JointTable joint_table(const MetricPotential& phi, const MetricPotential& psi, double Tmax,
                              const GrowthOptions& opt = {}) {
  require(phi.rank() == psi.rank(), "rank mismatch in joint table");
  JointTable jt;
  const auto [r, t] = detail::ball_for_threshold(psi, Tmax, opt.radius, &jt.heuristic);
  jt.Tmax = t;
  auto a = psi.impl().ball(r);
  auto b = phi.impl().ball(r);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < a->lo.size(); ++i)
    if (a->mid(i) < t) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return a->mid(x) < a->mid(y); });
  for (std::size_t i : idx) {
    jt.psi.push_back(a->mid(i));
    jt.phi.push_back(b->mid(i));
  }
  std::vector<double> levels;
  for (double x : jt.psi)
    if (levels.empty() || levels.back() != x) levels.push_back(x);
  jt.grid = detail::level_grid(levels);
  const double half = 0.5 * (levels.front() + levels.back());
  CompensatedSum sp, sq;
  for (std::size_t i = 0; i < jt.psi.size(); ++i)
    if (jt.psi[i] >= half) {
      sp.add(jt.phi[i]);
      sq.add(jt.psi[i]);
    }
  jt.top_ratio = sq.value() > 0 ? sp.value() / sq.value() : 0.0;
  return jt;
}

namespace detail {

/// log sum_{psi < T} exp(-t phi - s psi) on the table's grid.
inline std::vector<double> weighted_log_counts(const JointTable& jt, double t, double s) {
  const std::size_t n = jt.psi.size();
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, -t * jt.phi[i] - s * jt.psi[i]);
  std::vector<double> logf;
  CompensatedSum acc;
  std::size_t k = 0;
  for (double T : jt.grid) {
    while (k < n && jt.psi[k] < T) {
      acc.add(std::exp(-t * jt.phi[k] - s * jt.psi[k] - m));
      ++k;
    }
    logf.push_back(std::log(acc.value()) + m);
  }
  return logf;
}

inline SlopeFit weighted_growth(const JointTable& jt, double t, double s) {
  return fit_upper_half(jt.grid, weighted_log_counts(jt, t, s));
}

}  // namespace detail

struct ManhattanSample {
  double t = 0.0;
  double theta = 0.0;
  double theta_lower = 0.0;
  double theta_upper = 0.0;
  double shift = 0.0;  // s0 used in the weighted count
  int retries = 0;

  double width() const { return theta_upper - theta_lower; }
};

/// theta(t) = s0 + growth rate of sum_{psi < T} exp(-t phi - s0 psi) for any
/// s0 < theta(t). s0 starts kShiftGap below a first guess and moves down until
/// the measured rate is at least kMinRate.
inline constexpr double kShiftGap = 1.5;
inline constexpr double kMinRate = 0.5;

inline ManhattanSample poincare_theta(JointTable& jt, double t,
                                      std::optional<double> shift = std::nullopt) {
  if (jt.count_rate == 0.0) jt.count_rate = detail::weighted_growth(jt, 0.0, 0.0).point;
  ManhattanSample m;
  m.t = t;
  double s0 = shift ? *shift : jt.count_rate - t * jt.top_ratio - kShiftGap;
  for (;;) {
    const auto f = detail::weighted_growth(jt, t, s0);
    if (f.lower >= kMinRate || shift) {
      m.theta = s0 + f.point;
      m.theta_lower = s0 + f.lower;
      m.theta_upper = s0 + f.upper;
      m.shift = s0;
      return m;
    }
    if (++m.retries > 40) throw NumericalFailure("no shift gives a growing weighted count");
    s0 -= 0.5;
  }
}

inline ManhattanSample poincare_theta(const MetricPotential& phi, const MetricPotential& psi, double t, double Tmax,
                                      const GrowthOptions& opt = {}) {
  auto jt = joint_table(phi, psi, Tmax, opt);
  return poincare_theta(jt, t);
}

struct ManhattanCurve {
  std::vector<ManhattanSample> samples;
  bool decreasing = true;  // within bracket slack
  bool convex = true;      // second differences >= -slack
};

inline ManhattanCurve manhattan_curve(JointTable& jt, const std::vector<double>& tgrid) {
  ManhattanCurve c;
  for (double t : tgrid) c.samples.push_back(poincare_theta(jt, t));
  auto& s = c.samples;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i].t > s[i - 1].t && s[i].theta_lower > s[i - 1].theta_upper) c.decreasing = false;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double h0 = s[i].t - s[i - 1].t, h1 = s[i + 1].t - s[i].t;
    if (h0 <= 0 || h1 <= 0) continue;
    const double second = (s[i + 1].theta - s[i].theta) / h1 - (s[i].theta - s[i - 1].theta) / h0;
    const double slack = (s[i + 1].width() + s[i].width()) / h1 + (s[i].width() + s[i - 1].width()) / h0;
    if (second < -slack) c.convex = false;
  }
  return c;
}

inline ManhattanCurve manhattan_curve(const MetricPotential& phi, const MetricPotential& psi,
                                      const std::vector<double>& tgrid, double Tmax, const GrowthOptions& opt = {}) {
  auto jt = joint_table(phi, psi, Tmax, opt);
  return manhattan_curve(jt, tgrid);
}

// --- mean distortion --------------------------------------------------------------------

struct DistortionSlope {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double h = 0.0;
  ManhattanSample minus, plus;  // theta(-h), theta(h)

  double width() const { return upper - lower; }
};

/// -(theta(h) - theta(-h)) / 2h. With one common shift the difference is the
/// growth rate of log F_h - log F_{-h}, which is fitted directly so that the
/// transients of the two counts cancel.
inline DistortionSlope mean_distortion_slope(JointTable& jt, double h = 0.05) {
  require(h > 0, "h must be positive");
  const double s0 = std::min(poincare_theta(jt, -h).shift, poincare_theta(jt, h).shift);
  DistortionSlope d;
  d.h = h;
  d.minus = poincare_theta(jt, -h, s0);
  d.plus = poincare_theta(jt, h, s0);
  const auto fp = detail::weighted_log_counts(jt, h, s0);
  const auto fm = detail::weighted_log_counts(jt, -h, s0);
  std::vector<double> diff(fp.size());
  for (std::size_t i = 0; i < fp.size(); ++i) diff[i] = fp[i] - fm[i];
  const auto f = detail::fit_upper_half(jt.grid, diff);
  d.value = -f.point / (2 * h);
  d.lower = -f.upper / (2 * h);
  d.upper = -f.lower / (2 * h);
  return d;
}

inline DistortionSlope mean_distortion_slope(const MetricPotential& phi, const MetricPotential& psi, double h,
                                             double Tmax, const GrowthOptions& opt = {}) {
  auto jt = joint_table(phi, psi, Tmax, opt);
  return mean_distortion_slope(jt, h);
}

struct DistortionAverage {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<Rational> exact;
  std::size_t classes = 0;  // N, the number of classes with l_psi < T
  double T = 0.0;           // threshold used
  int maxlen = 0;
  bool certified = false;
  bool heuristic = false;

  double width() const { return upper - lower; }
};

/// Largest core length that can carry l_psi < T, from psi >= kappa |g|.
inline int classes_needed(const MetricPotential& psi, double T) {
  const double kappa = psi.impl().lipschitz_lower();
  if (!(kappa > 0)) return -1;
  return std::max(1, detail::covering_radius(T, kappa));
}

namespace detail {

inline bool below(const LengthEntry& e, double T) {
  if (e.exact) return *e.exact < rational_from_double(T);
  return e.value < T;
}

}  // namespace detail

/// (1/N) sum over classes with l_psi < T of l_phi / l_psi, from spectra over a
/// common class list.
inline DistortionAverage distortion_from_spectra(const LengthSpectrum& phi, const LengthSpectrum& psi, double T) {
  DistortionAverage d;
  d.T = T;
  d.certified = true;
  bool exact = true;
  Rational q = 0;
  CompensatedSum v, lo, hi;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const LengthEntry& a = phi.entries[i];
    const LengthEntry& b = psi.entries[i];
    if (!detail::below(b, T)) continue;
    if (!(b.value > 0)) throw NumericalFailure("zero translation length of " + format_class(psi.classes[i]));
    ++d.classes;
    d.certified = d.certified && a.certified && b.certified;
    d.heuristic = d.heuristic || a.heuristic || b.heuristic;
    if (exact && a.exact && b.exact)
      q += *a.exact / *b.exact;
    else
      exact = false;
    v.add(a.value / b.value);
    const Interval r = detail::entry_interval(a) / detail::entry_interval(b);
    lo.add(r.lo);
    hi.add(r.hi);
  }
  if (d.classes == 0) throw InvalidArgument("no class has translation length below T");
  const double n = static_cast<double>(d.classes);
  if (exact) {
    d.exact = q / Rational(static_cast<long long>(d.classes));
    d.value = d.lower = d.upper = to_double(*d.exact);
  } else {
    d.value = v.value() / n;
    d.lower = lo.value() / n;
    d.upper = hi.value() / n;
  }
  return d;
}

/// Class enumeration for {l_psi < T}. With a Lipschitz constant the length
/// bound is certified; otherwise `maxlen` is required and T is lowered to
/// kappa_emp (maxlen + 1), kappa_emp the least observed l_psi / |c|.
struct ClassWindow {
  std::vector<ConjClassRep> classes;
  int maxlen = 0;
  double T = 0.0;
  bool heuristic = false;
};

inline ClassWindow class_window(const MetricPotential& psi, double T, int maxlen) {
  ClassWindow w;
  w.T = T;
  const int need = classes_needed(psi, T);
  if (need >= 0) {
    if (maxlen > 0 && maxlen < need)
      throw InvalidArgument("maxlen " + std::to_string(maxlen) + " cannot exhaust classes with length below " +
                            std::to_string(T) + "; need " + std::to_string(need));
    w.maxlen = maxlen > 0 ? maxlen : need;
  } else {
    if (maxlen <= 0) throw InvalidArgument("potential " + psi.name() + " needs an explicit maxlen");
    w.maxlen = maxlen;
    w.heuristic = true;
  }
  w.classes = enumerate_classes(psi.rank(), w.maxlen);
  return w;
}

inline double empirical_threshold(const LengthSpectrum& psi, int maxlen, double T) {
  double kappa = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < psi.size(); ++i)
    kappa = std::min(kappa, psi.entries[i].value / static_cast<double>(psi.classes[i].length()));
  return std::min(T, kappa * (maxlen + 1));
}

inline DistortionAverage mean_distortion_avg(const MetricPotential& phi, const MetricPotential& psi, double T,
                                             int maxlen = 0, const LengthOptions& opt = {}) {
  auto w = class_window(psi, T, maxlen);
  const auto sq = spectrum(psi, w.classes, opt);
  if (w.heuristic) w.T = empirical_threshold(sq, w.maxlen, T);
  const auto sp = spectrum(phi, w.classes, opt);
  auto d = distortion_from_spectra(sp, sq, w.T);
  d.maxlen = w.maxlen;
  d.heuristic = d.heuristic || w.heuristic;
  return d;
}

// --- Manhattan potentials ----------------------------------------------------------------

struct ManhattanPotential {
  PotentialPtr potential;
  ManhattanSample sample;
};

/// t phi + theta(t) psi for normalized phi, psi.
inline ManhattanPotential manhattan_combination(const PotentialPtr& phi, const PotentialPtr& psi, double t,
                                                double Tmax, const GrowthOptions& opt = {}) {
  auto jt = joint_table(*phi, *psi, Tmax, opt);
  ManhattanPotential m;
  m.sample = poincare_theta(jt, t);
  m.potential = combination({make_term(t, phi), make_term(m.sample.theta, psi)});
  return m;
}

struct BoundaryPotential {
  PotentialPtr potential;
  DilEstimate dil;  // Dil(psi, phi)
};

/// Dil(psi, phi) phi - psi with the computed dilation lower bound.
inline BoundaryPotential manhattan_boundary(const PotentialPtr& phi, const PotentialPtr& psi, int maxlen,
                                            const LengthOptions& opt = {}) {
  const auto classes = enumerate_classes(psi->rank(), maxlen);
  const auto sp = spectrum(*phi, classes, opt), sq = spectrum(*psi, classes, opt);
  if (std::abs(delta_dist(sp, sq)) < 1e-12)
    throw InvalidArgument("proportional spectra; the Manhattan boundary potential is undefined");
  BoundaryPotential b;
  b.dil = dil_lower(sq, sp, maxlen);
  Term a = b.dil.exact ? make_term(*b.dil.exact, phi) : make_term(b.dil.value, phi);
  b.potential = combination({a, make_term(Rational(-1), psi)});
  return b;
}

}  // namespace hypgeo
