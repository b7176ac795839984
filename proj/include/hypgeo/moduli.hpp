#pragma once

// Distances between metric structures computed from finite spectra: the
// dilation Dil(phi, psi) = sup l_phi / l_psi, the symmetrized Thurston metric
// Delta = log(Dil(phi,psi) Dil(psi,phi)), the strong-length distance D_psi0 and
// additive comparability constants. Suprema are taken over enumerated classes,
// so every value is a lower bound for the true one.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "hypgeo/enumerate.hpp"
#include "hypgeo/length.hpp"

namespace hypgeo {

struct DilEstimate {
  double value = 0.0;
  Interval ratio;  // interval of the witness ratio from the entry brackets
  ConjClassRep witness;
  int maxlen = 0;
  bool certified = false;
  std::optional<Rational> exact;
};

namespace detail {

inline Interval entry_interval(const LengthEntry& e) { return {std::min(e.lower, e.value), std::max(e.upper, e.value)}; }

}  // namespace detail

/// max over the classes of l_phi / l_psi, ties broken by class order.
inline DilEstimate dil_lower(const LengthSpectrum& phi, const LengthSpectrum& psi, int maxlen = 0) {
  require(phi.size() == psi.size() && phi.size() > 0, "dilation needs two spectra over the same nonempty class list");
  DilEstimate d;
  d.maxlen = maxlen;
  bool exact = true;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const LengthEntry& b = psi.entries[i];
    if (!(b.value > 0) || (b.exact && *b.exact == 0))
      throw NumericalFailure("zero translation length of class " + format_class(psi.classes[i]) +
                             " in the denominator of a dilation");
    exact = exact && phi.entries[i].exact && b.exact;
  }
  std::optional<Rational> best_exact;
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const LengthEntry& a = phi.entries[i];
    const LengthEntry& b = psi.entries[i];
    if (exact) {
      const Rational r = *a.exact / *b.exact;
      if (!best_exact || r > *best_exact) {
        best_exact = r;
        best = i;
      }
    } else if (const double r = a.value / b.value; r > best_value) {
      best_value = r;
      best = i;
    }
  }
  d.witness = psi.classes[best];
  const LengthEntry& a = phi.entries[best];
  const LengthEntry& b = psi.entries[best];
  d.certified = a.certified && b.certified;
  if (exact) {
    d.exact = best_exact;
    d.value = to_double(*best_exact);
    d.ratio = Interval(d.value);
  } else {
    d.value = best_value;
    const Interval ia = detail::entry_interval(a), ib = detail::entry_interval(b);
    d.ratio = ib.lo > 0 ? ia / ib : Interval(d.value);
  }
  return d;
}

inline DilEstimate dil_lower(const MetricPotential& phi, const MetricPotential& psi, int maxlen,
                             const LengthOptions& opt = {}) {
  const auto classes = enumerate_classes(psi.rank(), maxlen);
  return dil_lower(spectrum(phi, classes, opt), spectrum(psi, classes, opt), maxlen);
}

/// log(Dil(phi,psi) Dil(psi,phi)) on spectra over the same classes.
inline double delta_dist(const LengthSpectrum& phi, const LengthSpectrum& psi) {
  const DilEstimate a = dil_lower(phi, psi), b = dil_lower(psi, phi);
  if (a.exact && b.exact) return std::log(to_double(*a.exact * *b.exact));
  return std::log(a.value * b.value);
}

inline double delta_dist(const MetricPotential& phi, const MetricPotential& psi, int maxlen,
                         const LengthOptions& opt = {}) {
  const auto classes = enumerate_classes(psi.rank(), maxlen);
  return delta_dist(spectrum(phi, classes, opt), spectrum(psi, classes, opt));
}

struct StrongDistance {
  double value = 0.0;
  ConjClassRep witness;
  double dil_phi = 0.0;  // Dil(phi, psi0) used for normalization
  double dil_psi = 0.0;  // Dil(psi, psi0)
  std::optional<Rational> exact;
};

/// max over classes of |l_phi^ - l_psi^| / l_psi0 with phi^ = phi / Dil(phi, psi0)
/// and psi^ = psi / Dil(psi, psi0), using the computed dilations.
inline StrongDistance strong_length_dist(const LengthSpectrum& phi, const LengthSpectrum& psi,
                                         const LengthSpectrum& psi0) {
  const DilEstimate dp = dil_lower(phi, psi0), dq = dil_lower(psi, psi0);
  StrongDistance s;
  s.dil_phi = dp.value;
  s.dil_psi = dq.value;
  const bool exact = dp.exact && dq.exact;
  std::optional<Rational> best;
  s.value = -1.0;
  for (std::size_t i = 0; i < psi0.size(); ++i) {
    const LengthEntry& a = phi.entries[i];
    const LengthEntry& b = psi.entries[i];
    const LengthEntry& c = psi0.entries[i];
    if (exact && a.exact && b.exact && c.exact) {
      Rational r = (*a.exact / *dp.exact - *b.exact / *dq.exact) / *c.exact;
      if (r < 0) r = -r;
      if (!best || r > *best) {
        best = r;
        s.witness = psi0.classes[i];
      }
      continue;
    }
    const double r = std::abs(a.value / dp.value - b.value / dq.value) / c.value;
    if (r > s.value) {
      s.value = r;
      s.witness = psi0.classes[i];
    }
  }
  if (best) {
    s.exact = best;
    s.value = to_double(*best);
  }
  return s;
}

inline StrongDistance strong_length_dist(const MetricPotential& phi, const MetricPotential& psi,
                                         const MetricPotential& psi0, int maxlen, const LengthOptions& opt = {}) {
  const auto classes = enumerate_classes(psi0.rank(), maxlen);
  return strong_length_dist(spectrum(phi, classes, opt), spectrum(psi, classes, opt), spectrum(psi0, classes, opt));
}

struct Comparability {
  double C = 0.0;
  Word witness;
  double dil_phi_psi = 0.0;
  double dil_psi_phi = 0.0;
  int radius = 0;
};

/// Smallest C >= 0 with psi/Dil(psi,phi) - C <= phi <= Dil(phi,psi) psi + C on
/// the ball, evaluated on the safe side of every interval.
inline Comparability comparability_C(const MetricPotential& phi, const MetricPotential& psi, int radius,
                                     double dil_phi_psi, double dil_psi_phi) {
  require(dil_phi_psi > 0 && dil_psi_phi > 0, "dilations must be positive");
  const auto a = phi.impl().ball(radius);
  const auto b = psi.impl().ball(radius);
  const DenseBall ball(phi.rank(), radius);
  Comparability out;
  out.radius = radius;
  out.dil_phi_psi = dil_phi_psi;
  out.dil_psi_phi = dil_psi_phi;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    const double c1 = b->hi[i] / dil_psi_phi - a->lo[i];
    const double c2 = a->hi[i] - dil_phi_psi * b->lo[i];
    const double c = std::max(c1, c2);
    if (c > out.C) {
      out.C = c;
      arg = i;
    }
  }
  out.witness = ball.word_at(static_cast<std::int64_t>(arg));
  return out;
}

inline Comparability comparability_C(const MetricPotential& phi, const MetricPotential& psi, int radius, int maxlen,
                                     const LengthOptions& opt = {}) {
  const auto classes = enumerate_classes(psi.rank(), maxlen);
  const auto sp = spectrum(phi, classes, opt), sq = spectrum(psi, classes, opt);
  return comparability_C(phi, psi, radius, dil_lower(sp, sq).value, dil_lower(sq, sp).value);
}

}  // namespace hypgeo
