#pragma once

// Finitely supported probability measures on F_r: construction, convolution,
// entropy, sampling and drift.

#include <algorithm>
#include <cmath>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hypgeo/enumerate.hpp"
#include "hypgeo/parallel.hpp"
#include "hypgeo/potential.hpp"
#include "hypgeo/rational.hpp"
#include "hypgeo/rng.hpp"

namespace hypgeo {

/// Atoms are kept sorted in word order. Rational measures carry exact weights
/// alongside their double images.
class FiniteMeasure {
 public:
  FiniteMeasure() = default;

  static FiniteMeasure from_rational(int rank, std::vector<std::pair<Word, Rational>> atoms) {
    FiniteMeasure m(rank);
    std::sort(atoms.begin(), atoms.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<Rational> exact;
    Rational total = 0;
    for (auto& [w, p] : atoms) {
      if (w.rank() != rank) throw InvalidArgument("measure atom has the wrong rank");
      if (p <= 0) throw InvalidArgument("measure weights must be positive");
      total += p;
      if (!m.atoms_.empty() && m.atoms_.back() == w) {
        exact.back() += p;
        continue;
      }
      m.atoms_.push_back(w);
      exact.push_back(p);
    }
    if (m.atoms_.empty()) throw InvalidArgument("measure has no atoms");
    if (total != 1) throw InvalidArgument("measure mass is " + to_string(total) + ", not 1");
    for (const auto& p : exact) m.weights_.push_back(to_double(p));
    m.exact_ = std::move(exact);
    return m;
  }

  static FiniteMeasure from_double(int rank, std::vector<std::pair<Word, double>> atoms, double tol = 1e-12) {
    FiniteMeasure m(rank);
    std::sort(atoms.begin(), atoms.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    CompensatedSum total;
    for (auto& [w, p] : atoms) {
      if (w.rank() != rank) throw InvalidArgument("measure atom has the wrong rank");
      if (!(p > 0)) throw InvalidArgument("measure weights must be positive");
      total.add(p);
      if (!m.atoms_.empty() && m.atoms_.back() == w) {
        m.weights_.back() += p;
        continue;
      }
      m.atoms_.push_back(w);
      m.weights_.push_back(p);
    }
    if (m.atoms_.empty()) throw InvalidArgument("measure has no atoms");
    if (std::abs(total.value() - 1.0) > tol) throw InvalidArgument("measure mass differs from 1");
    return m;
  }

  int rank() const noexcept { return rank_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  const std::vector<Word>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  bool is_exact() const noexcept { return exact_.has_value(); }
  const std::vector<Rational>& exact_weights() const { return exact_.value(); }

  double weight(const Word& w) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), w);
    if (it == atoms_.end() || !(*it == w)) return 0.0;
    return weights_[static_cast<std::size_t>(it - atoms_.begin())];
  }
  std::optional<Rational> exact_weight(const Word& w) const {
    if (!exact_) return std::nullopt;
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), w);
    if (it == atoms_.end() || !(*it == w)) return Rational(0);
    return (*exact_)[static_cast<std::size_t>(it - atoms_.begin())];
  }

  /// mu(g) = mu(g^-1) for every atom (exactly in rational mode).
  bool is_symmetric(double tol = 1e-15) const {
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      const Word inv = invert(atoms_[i]);
      auto it = std::lower_bound(atoms_.begin(), atoms_.end(), inv);
      if (it == atoms_.end() || !(*it == inv)) return false;
      const auto j = static_cast<std::size_t>(it - atoms_.begin());
      if (exact_) {
        if ((*exact_)[i] != (*exact_)[j]) return false;
      } else if (std::abs(weights_[i] - weights_[j]) > tol) {
        return false;
      }
    }
    return true;
  }

  int max_length() const {
    std::size_t m = 0;
    for (const Word& w : atoms_) m = std::max(m, w.size());
    return static_cast<int>(m);
  }

  double total_mass() const {
    CompensatedSum s;
    for (double w : weights_) s.add(w);
    return s.value();
  }

 private:
  explicit FiniteMeasure(int rank) : rank_(rank) { check_rank(rank); }

  int rank_ = 1;
  std::vector<Word> atoms_;
  std::vector<double> weights_;
  std::optional<std::vector<Rational>> exact_;
};

/// Uniform measure on the distinct words of `set`.
inline FiniteMeasure uniform_measure(std::vector<Word> set) {
  if (set.empty()) throw InvalidArgument("uniform measure of an empty set");
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  const Rational p(1, static_cast<long long>(set.size()));
  std::vector<std::pair<Word, Rational>> atoms;
  for (Word& w : set) atoms.emplace_back(std::move(w), p);
  const int rank = atoms.front().first.rank();
  return FiniteMeasure::from_rational(rank, std::move(atoms));
}

inline FiniteMeasure point_mass(const Word& w) { return FiniteMeasure::from_rational(w.rank(), {{w, Rational(1)}}); }

inline FiniteMeasure simple_random_walk(int rank) { return uniform_measure(standard_genset(rank).words()); }

struct ThickenedSphere {
  std::vector<Word> set;
  FiniteMeasure measure;
};

/// S_l = {g : l - delta < d(o, g) <= l} and the uniform measure on it. The
/// search region is the word ball of radius floor(l / kappa), where kappa is
/// the potential's Lipschitz lower constant.
inline ThickenedSphere thickened_sphere(const MetricPotential& d, double l, double delta) {
  require(delta > 0 && l > delta, "thickened sphere needs l > delta > 0");
  require(d.flags().exact, "thickened sphere needs an exact potential");
  const double kappa = d.impl().lipschitz_lower();
  if (!(kappa > 0)) throw OutOfRange("potential has no known lower Lipschitz constant; cannot bound S_l");
  const int radius = static_cast<int>(std::floor(l / kappa + 1e-9));
  auto vals = d.impl().ball(radius);
  const DenseBall ball(d.rank(), radius);
  ThickenedSphere out;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    const double v = vals->lo[i];
    if (v > l - delta && v <= l) out.set.push_back(ball.word_at(static_cast<std::int64_t>(i)));
  }
  if (out.set.empty()) throw InvalidArgument("thickened sphere is empty");
  out.measure = uniform_measure(out.set);
  return out;
}

struct ConvolveOptions {
  std::uint64_t rational_threshold = 20000;  // exact arithmetic while the result support stays below this
  std::uint64_t cap = default_limits().max_elements;
  double drop_below = 0.0;  // float mode: drop atoms below this mass
};

struct Convolution {
  FiniteMeasure measure;
  double dropped = 0.0;
};

/// (mu * nu)(g) = sum_h mu(h) nu(h^-1 g).
inline Convolution convolve_ex(const FiniteMeasure& mu, const FiniteMeasure& nu, const ConvolveOptions& opt = {}) {
  if (mu.rank() != nu.rank()) throw InvalidArgument("rank mismatch in convolution");
  const double bound = static_cast<double>(mu.size()) * static_cast<double>(nu.size());
  const int rank = mu.rank();
  std::unordered_map<Word, std::size_t, WordHash> slot;
  std::vector<Word> words;
  auto index = [&](Word w) {
    auto [it, fresh] = slot.emplace(w, words.size());
    if (fresh) {
      words.push_back(std::move(w));
      if (words.size() > opt.cap) throw ResourceLimit("convolution support exceeds the element cap");
    }
    return it->second;
  };
  Convolution out;
  if (mu.is_exact() && nu.is_exact() && bound <= static_cast<double>(opt.rational_threshold) * 16) {
    std::vector<Rational> acc;
    for (std::size_t i = 0; i < mu.size(); ++i)
      for (std::size_t j = 0; j < nu.size(); ++j) {
        const std::size_t k = index(mu.atoms()[i] * nu.atoms()[j]);
        if (k == acc.size()) acc.emplace_back(0);
        acc[k] += mu.exact_weights()[i] * nu.exact_weights()[j];
      }
    if (words.size() <= opt.rational_threshold) {
      std::vector<std::pair<Word, Rational>> atoms;
      for (std::size_t k = 0; k < words.size(); ++k)
        if (acc[k] > 0) atoms.emplace_back(words[k], acc[k]);
      out.measure = FiniteMeasure::from_rational(rank, std::move(atoms));
      return out;
    }
    slot.clear();
    words.clear();
  }
  // float mode: products visited in the fixed atom order
  std::vector<CompensatedSum> acc;
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) {
      const std::size_t k = index(mu.atoms()[i] * nu.atoms()[j]);
      if (k == acc.size()) acc.emplace_back();
      acc[k].add(mu.weights()[i] * nu.weights()[j]);
    }
  std::vector<std::pair<Word, double>> atoms;
  CompensatedSum kept, dropped;
  for (std::size_t k = 0; k < words.size(); ++k) {
    const double v = acc[k].value();
    if (v <= 0) continue;
    if (v < opt.drop_below) {
      dropped.add(v);
      continue;
    }
    kept.add(v);
    atoms.emplace_back(words[k], v);
  }
  out.dropped = dropped.value();
  // renormalization only absorbs rounding; dropped mass is reported, not redistributed
  const double tol = 1e-9 + out.dropped;
  out.measure = FiniteMeasure::from_double(rank, std::move(atoms), tol);
  return out;
}

inline FiniteMeasure convolve(const FiniteMeasure& mu, const FiniteMeasure& nu, const ConvolveOptions& opt = {}) {
  return convolve_ex(mu, nu, opt).measure;
}

inline double shannon_entropy(const FiniteMeasure& mu) {
  CompensatedSum h;
  for (double p : mu.weights()) h.add(-p * std::log(p));
  return h.value();
}

/// H(mu^{*k}) / k for k = 1..kmax. Each term bounds the asymptotic entropy
/// from above.
inline std::vector<double> entropy_upper(const FiniteMeasure& mu, int kmax, const ConvolveOptions& opt = {}) {
  require(kmax >= 1, "kmax must be >= 1");
  std::vector<double> out;
  FiniteMeasure p = mu;
  for (int k = 1; k <= kmax; ++k) {
    if (k > 1) p = convolve(p, mu, opt);
    out.push_back(shannon_entropy(p) / k);
  }
  return out;
}

namespace detail {

inline std::vector<double> cumulative(const FiniteMeasure& mu) {
  std::vector<double> c;
  double s = 0;
  for (double w : mu.weights()) c.push_back(s += w);
  c.back() = std::max(c.back(), 1.0);
  return c;
}

inline std::size_t draw(const std::vector<double>& cum, SplitMix64& rng) {
  const double u = rng.uniform();
  auto it = std::upper_bound(cum.begin(), cum.end(), u);
  return std::min(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
}

}  // namespace detail

/// Z_0 = o, Z_{k+1} = Z_k * X_{k+1} with X_k i.i.d. from mu; the stream is
/// SplitMix64 seeded with `seed`, one uniform per step, inverted through the
/// cumulative weights in atom order.
inline std::vector<Word> sample_walk(const FiniteMeasure& mu, int n, std::uint64_t seed) {
  require(n >= 0, "walk length must be >= 0");
  const auto cum = detail::cumulative(mu);
  SplitMix64 rng(seed);
  std::vector<Word> z{identity(mu.rank())};
  for (int k = 0; k < n; ++k) z.push_back(z.back() * mu.atoms()[detail::draw(cum, rng)]);
  return z;
}

struct DriftEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  int n = 0;
  int trials = 0;
};

/// Mean of d(o, Z_n) / n over independent trials with seeds seed ^ trial.
inline DriftEstimate drift(const FiniteMeasure& mu, const MetricPotential& d, int n, int trials, std::uint64_t seed) {
  require(n >= 0 && trials >= 1, "drift needs n >= 0 and trials >= 1");
  DriftEstimate est;
  est.n = n;
  est.trials = trials;
  if (n == 0) return est;
  const auto cum = detail::cumulative(mu);
  std::vector<double> v(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    SplitMix64 rng(trial_seed(seed, t));
    Word z = identity(mu.rank());
    for (int k = 0; k < n; ++k) z = z * mu.atoms()[detail::draw(cum, rng)];
    v[t] = d.eval(z).mid() / n;
  });
  CompensatedSum s, s2;
  for (double x : v) s.add(x);
  est.mean = s.value() / trials;
  for (double x : v) s2.add((x - est.mean) * (x - est.mean));
  est.stderr_ = trials > 1 ? std::sqrt(s2.value() / (trials - 1) / trials) : 0.0;
  return est;
}

}  // namespace hypgeo
