#pragma once

// Stable translation lengths l_psi[g] = lim psi(o, g^k) / k and spectra over
// lists of conjugacy classes.

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "hypgeo/parallel.hpp"
#include "hypgeo/potential.hpp"

namespace hypgeo {

struct LengthOptions {
  int kmax = 16;
  int period_cap = 6;
};

namespace detail {

/// Smallest period p <= cap such that the last 2p differences form two
/// identical windows; 0 when none.
template <class T>
int detect_period(const std::vector<T>& diffs, int cap) {
  const int n = static_cast<int>(diffs.size());
  for (int p = 1; p <= cap && 2 * p <= n; ++p) {
    bool ok = true;
    for (int i = 0; i < p && ok; ++i)
      ok = diffs[static_cast<std::size_t>(n - 2 * p + i)] == diffs[static_cast<std::size_t>(n - p + i)];
    if (ok) return p;
  }
  return 0;
}

inline LengthEntry combine_entries(const std::vector<Term>& terms, const std::vector<LengthEntry>& parts) {
  LengthEntry e;
  e.certified = true;
  bool exact = true;
  Rational q = 0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double c = terms[i].coef;
    const LengthEntry& p = parts[i];
    e.value += c * p.value;
    e.lower += c >= 0 ? c * p.lower : c * p.upper;
    e.upper += c >= 0 ? c * p.upper : c * p.lower;
    e.certified = e.certified && p.certified;
    e.heuristic = e.heuristic || p.heuristic;
    if (exact && p.exact && terms[i].exact_coef)
      q += *terms[i].exact_coef * *p.exact;
    else
      exact = false;
  }
  if (exact) {
    e.exact = q;
    e.value = to_double(q);
  }
  if (e.certified) e.lower = e.upper = e.value;
  return e;
}

}  // namespace detail

/// Stable translation length of the class of g.
///
/// The Fekete bound min_k psi(o, c^k)/k over the cyclic core c is always an
/// upper bound for pseudometrics. For exact potentials the first differences
/// psi(o, c^{k+1}) - psi(o, c^k) are searched for a period; a period seen over
/// two full windows certifies the value as the window mean.
inline LengthEntry stable_length(const MetricPotential& psi, const Word& g, const LengthOptions& opt = {}) {
  if (g.is_identity()) throw InvalidArgument("stable_length of the identity");
  require(opt.kmax >= 2, "kmax must be >= 2");
  const ConjClassRep cls = canonical_class(g);
  if (auto e = psi.impl().native_length(cls)) return *e;
  if (const auto* terms = psi.impl().terms()) {
    std::vector<LengthEntry> parts;
    for (const Term& t : *terms) parts.push_back(stable_length(*t.base, cls.core(), opt));
    return detail::combine_entries(*terms, parts);
  }
  const Word& c = cls.core();
  LengthEntry e;
  std::vector<double> diffs;
  if (auto ex = psi.impl().exact_ray(c, opt.kmax)) {
    const auto& a = *ex;
    std::vector<Rational> d;
    e.upper = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= opt.kmax; ++k) {
      d.push_back(a[static_cast<std::size_t>(k)] - a[static_cast<std::size_t>(k) - 1]);
      e.upper = std::min(e.upper, round_up(to_double(a[static_cast<std::size_t>(k)] / k)));
      diffs.push_back(to_double(d.back()));
    }
    if (int p = detail::detect_period(d, opt.period_cap); p > 0) {
      Rational sum = 0;
      for (int i = 0; i < p; ++i) sum += d[d.size() - 1 - static_cast<std::size_t>(i)];
      e.exact = sum / p;
      e.value = e.lower = e.upper = to_double(*e.exact);
      e.certified = true;
      return e;
    }
  } else {
    auto a = psi.impl().ray(c, opt.kmax);
    e.upper = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= opt.kmax; ++k) {
      diffs.push_back(a[static_cast<std::size_t>(k)].mid() - a[static_cast<std::size_t>(k) - 1].mid());
      e.upper = std::min(e.upper, round_up(a[static_cast<std::size_t>(k)].hi / k));
    }
  }
  const auto half = diffs.begin() + static_cast<std::ptrdiff_t>(diffs.size() / 2);
  const auto [lo, hi] = std::minmax_element(half, diffs.end());
  e.value = e.upper;
  e.lower = e.upper - (*hi - *lo);
  e.heuristic = true;
  return e;
}

struct LengthSpectrum {
  std::vector<ConjClassRep> classes;
  std::vector<LengthEntry> entries;

  std::size_t size() const noexcept { return classes.size(); }

  const LengthEntry& at(const ConjClassRep& c) const {
    if (index_.empty()) build_index();
    auto it = index_.find(c);
    if (it == index_.end()) throw OutOfRange("class " + format_class(c) + " not in spectrum");
    return entries[it->second];
  }
  bool contains(const ConjClassRep& c) const {
    if (index_.empty()) build_index();
    return index_.count(c) > 0;
  }
  bool all_certified() const {
    return std::all_of(entries.begin(), entries.end(), [](const LengthEntry& e) { return e.certified; });
  }

 private:
  void build_index() const {
    for (std::size_t i = 0; i < classes.size(); ++i) index_.emplace(classes[i], i);
  }
  mutable std::unordered_map<ConjClassRep, std::size_t, ClassHash> index_;
};

/// One entry per class; combinations are evaluated by linearity from the
/// spectra of their terms.
inline LengthSpectrum spectrum(const MetricPotential& psi, const std::vector<ConjClassRep>& classes,
                               const LengthOptions& opt = {}) {
  LengthSpectrum s;
  s.classes = classes;
  if (const auto* terms = psi.impl().terms()) {
    std::vector<LengthSpectrum> parts;
    for (const Term& t : *terms) parts.push_back(spectrum(*t.base, classes, opt));
    for (std::size_t i = 0; i < classes.size(); ++i) {
      std::vector<LengthEntry> p;
      for (const auto& part : parts) p.push_back(part.entries[i]);
      s.entries.push_back(detail::combine_entries(*terms, p));
    }
    return s;
  }
  s.entries.resize(classes.size());
  parallel_for(
      classes.size(), [&](std::size_t i) { s.entries[i] = stable_length(psi, classes[i].core(), opt); }, 16);
  return s;
}

}  // namespace hypgeo
