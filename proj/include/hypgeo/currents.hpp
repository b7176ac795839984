#pragma once

// Rational geodesic currents as finite weighted sums of primitive classes,
// their lengths, and the normalized averages
//   Lambda_T = (1/N) sum_{l_psi[g] < T} eta_[g] / l_psi[g],
// where eta_[h^m] = m eta_[h] for primitive h.

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "hypgeo/growth.hpp"
#include "hypgeo/length.hpp"

namespace hypgeo {

struct ComboTerm {
  ConjClassRep cls;  // primitive
  double weight = 0.0;
  std::optional<Rational> exact;
};

class RationalCombo {
 public:
  const std::vector<ComboTerm>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_exact() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const ComboTerm& t) { return t.exact.has_value(); });
  }

  /// Adds w eta_[c], folding proper powers onto their primitive root.
  void add(const ConjClassRep& c, const Rational& w) {
    const auto r = primitive_root(c);
    accumulate(r.root, w * r.multiplicity, to_double(w) * r.multiplicity, true);
  }
  void add(const ConjClassRep& c, double w) {
    const auto r = primitive_root(c);
    accumulate(r.root, std::nullopt, w * r.multiplicity, false);
  }
  void add(const RationalCombo& other) {
    for (const auto& t : other.terms_)
      if (t.exact)
        add(t.cls, *t.exact);
      else
        add(t.cls, t.weight);
  }

 private:
  void accumulate(const ConjClassRep& root, std::optional<Rational> w, double wd, bool exact) {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), root,
                               [](const ComboTerm& t, const ConjClassRep& c) { return t.cls < c; });
    if (it == terms_.end() || !(it->cls == root)) {
      ComboTerm t;
      t.cls = root;
      it = terms_.insert(it, t);
      if (exact) it->exact = Rational(0);
    } else if (!exact) {
      it->exact.reset();
    }
    if (!(wd > 0)) throw InvalidArgument("current weights must be positive");
    if (it->exact && w) {
      *it->exact += *w;
      it->weight = to_double(*it->exact);
    } else {
      it->exact.reset();
      it->weight += wd;
    }
  }

  std::vector<ComboTerm> terms_;  // sorted by class
};

inline RationalCombo rational_current(const ConjClassRep& c) {
  RationalCombo r;
  r.add(c, Rational(1));
  return r;
}

struct CurrentLength {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<Rational> exact;
  bool certified = true;
};

/// sum weight l_phi[class] with lengths looked up in `sp`.
inline CurrentLength eval_length(const LengthSpectrum& sp, const RationalCombo& combo) {
  CurrentLength out;
  Rational q = 0;
  bool exact = true;
  CompensatedSum v, lo, hi;
  for (const auto& t : combo.terms()) {
    const LengthEntry& e = sp.at(t.cls);
    out.certified = out.certified && e.certified;
    if (exact && t.exact && e.exact)
      q += *t.exact * *e.exact;
    else
      exact = false;
    v.add(t.weight * e.value);
    lo.add(t.weight * std::min(e.lower, e.value));
    hi.add(t.weight * std::max(e.upper, e.value));
  }
  if (exact) {
    out.exact = q;
    out.value = out.lower = out.upper = to_double(q);
  } else {
    out.value = v.value();
    out.lower = lo.value();
    out.upper = hi.value();
  }
  return out;
}

inline CurrentLength eval_length(const MetricPotential& phi, const RationalCombo& combo, const LengthOptions& opt = {}) {
  std::vector<ConjClassRep> classes;
  for (const auto& t : combo.terms()) classes.push_back(t.cls);
  return eval_length(spectrum(phi, classes, opt), combo);
}

struct LambdaT {
  RationalCombo combo;
  std::size_t classes = 0;  // N
  double T = 0.0;
  int maxlen = 0;
  bool heuristic = false;
};

/// Lambda_T from a spectrum of psi over a class list closed under roots.
inline LambdaT lambda_from_spectrum(const LengthSpectrum& psi, double T, bool primitive_only = false) {
  LambdaT l;
  l.T = T;
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (!detail::below(psi.entries[i], T)) continue;
    if (primitive_only && primitive_root(psi.classes[i]).multiplicity > 1) continue;
    picked.push_back(i);
  }
  if (picked.empty()) throw InvalidArgument("no class has translation length below T");
  l.classes = picked.size();
  const long long n = static_cast<long long>(picked.size());
  for (std::size_t i : picked) {
    const LengthEntry& e = psi.entries[i];
    if (!(e.value > 0)) throw NumericalFailure("zero translation length of " + format_class(psi.classes[i]));
    if (e.exact)
      l.combo.add(psi.classes[i], Rational(1) / (Rational(n) * *e.exact));
    else
      l.combo.add(psi.classes[i], 1.0 / (static_cast<double>(n) * e.value));
  }
  return l;
}

inline LambdaT lambda_T(const MetricPotential& psi, double T, int maxlen = 0, const LengthOptions& opt = {}) {
  auto w = class_window(psi, T, maxlen);
  const auto sq = spectrum(psi, w.classes, opt);
  if (w.heuristic) w.T = empirical_threshold(sq, w.maxlen, T);
  auto l = lambda_from_spectrum(sq, w.T);
  l.maxlen = w.maxlen;
  l.heuristic = w.heuristic;
  return l;
}

struct BmsRow {
  double T = 0.0;
  std::size_t classes = 0;
  CurrentLength phi_length;  // l_phi(Lambda_T)
  CurrentLength psi_length;  // l_psi(Lambda_T), 1 by construction
  DistortionAverage average;  // the spectrum-side mean distortion at T
  bool identity_holds = false;  // l_phi(Lambda_T) == average, exactly when both are exact
  double convergence = 0.0;     // |l_phi(Lambda_T) - previous row|, a heuristic bracket half-width
  std::size_t primitive_classes = 0;
  double primitive_value = 0.0;  // same average over primitive classes only
};

/// l_phi(Lambda_T) for T in the grid, next to the class-averaged distortion.
inline std::vector<BmsRow> bms_ratio_convergence(const MetricPotential& phi, const MetricPotential& psi,
                                                 const std::vector<double>& Tgrid, int maxlen = 0,
                                                 const LengthOptions& opt = {}) {
  require(!Tgrid.empty(), "empty T grid");
  const double Tmax = *std::max_element(Tgrid.begin(), Tgrid.end());
  auto w = class_window(psi, Tmax, maxlen);
  const auto sq = spectrum(psi, w.classes, opt);
  const auto sp = spectrum(phi, w.classes, opt);
  std::vector<BmsRow> rows;
  for (double T : Tgrid) {
    const double t = w.heuristic ? empirical_threshold(sq, w.maxlen, T) : T;
    BmsRow r;
    r.T = t;
    const auto lam = lambda_from_spectrum(sq, t);
    r.classes = lam.classes;
    r.phi_length = eval_length(sp, lam.combo);
    r.psi_length = eval_length(sq, lam.combo);
    r.average = distortion_from_spectra(sp, sq, t);
    r.average.maxlen = w.maxlen;
    if (r.phi_length.exact && r.average.exact)
      r.identity_holds = *r.phi_length.exact == *r.average.exact;
    else
      r.identity_holds = std::abs(r.phi_length.value - r.average.value) <= 1e-12 * std::abs(r.average.value);
    const auto prim = lambda_from_spectrum(sq, t, true);
    r.primitive_classes = prim.classes;
    r.primitive_value = eval_length(sp, prim.combo).value;
    if (!rows.empty()) r.convergence = std::abs(r.phi_length.value - rows.back().phi_length.value);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace hypgeo
