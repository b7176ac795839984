#pragma once

// Gromov products, double differences and four-point diagnostics.
//
// Conventions for a (possibly asymmetric) potential psi:
//   <a|b>_c       = (psi(a,c) + psi(c,b) - psi(a,b)) / 2
//   <a,a'|b,b'>   = (psi(a,b) - psi(a',b) - psi(a,b') + psi(a',b')) / 2

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <vector>

#include "hypgeo/enumerate.hpp"
#include "hypgeo/parallel.hpp"
#include "hypgeo/potential.hpp"
#include "hypgeo/rng.hpp"

namespace hypgeo {

inline Interval gromov_product(const MetricPotential& psi, const Word& a, const Word& b, const Word& c) {
  return Interval(0.5) * (psi.eval(a, c) + psi.eval(c, b) - psi.eval(a, b));
}

inline Interval double_difference(const MetricPotential& psi, const Word& a, const Word& a2, const Word& b,
                                  const Word& b2) {
  return Interval(0.5) * (psi.eval(a, b) - psi.eval(a2, b) - psi.eval(a, b2) + psi.eval(a2, b2));
}

struct ScanOptions {
  std::uint64_t budget = default_limits().max_quadruples;  // exhaustive at or below this many quadruples
  std::uint64_t seed = 1;
};

/// Result of a four-point scan. `value` is the maximum found (clipped at 0);
/// `slack` bounds the effect of interval widths of the inputs.
struct ScanResult {
  double value = 0.0;
  double slack = 0.0;
  bool exhaustive = true;
  std::uint64_t quadruples = 0;
};

/// Delta and strong-hyperbolicity defects over one scan.
struct HypScan {
  ScanResult delta;
  std::vector<double> eps;
  std::vector<ScanResult> strong;
};

namespace detail {

/// psi(x, y) for all x, y in the ball of radius n, row-major.
struct PairTable {
  std::size_t n = 0;
  std::vector<double> mid;
  double max_width = 0.0;
};

inline PairTable pair_table(const MetricPotential& psi, int n) {
  const DenseBall ball(psi.rank(), n);
  auto vals = psi.impl().ball(2 * n);
  PairTable t;
  t.n = ball.size();
  t.mid.resize(t.n * t.n);
  std::vector<Word> words(t.n);
  for (std::size_t i = 0; i < t.n; ++i) words[i] = ball.word_at(static_cast<std::int64_t>(i));
  for (std::size_t i = 0; i < t.n; ++i)
    for (std::size_t j = 0; j < t.n; ++j) {
      const auto k = static_cast<std::size_t>(dense_index(relative(words[i], words[j])));
      t.mid[i * t.n + j] = vals->mid(k);
      t.max_width = std::max(t.max_width, vals->hi[k] - vals->lo[k]);
    }
  return t;
}

}  // namespace detail

/// One pass over quadruples (x, y, z, w) of the ball of radius n computing
///   max min(<x|y>_w, <y|z>_w) - <x|z>_w
/// and, for each eps, max exp(-eps<x|z>_w) - exp(-eps<x|y>_w) - exp(-eps<y|z>_w).
/// Exhaustive when (#ball)^4 <= budget, otherwise over seeded random
/// (w, x, z) triples with every y.
inline HypScan hyperbolicity_scan(const MetricPotential& psi, int n, std::vector<double> eps,
                                  const ScanOptions& opt = {}) {
  require(n >= 0, "ball radius must be >= 0");
  for (double e : eps) require(e > 0, "eps must be positive");
  const auto t = detail::pair_table(psi, n);
  const std::size_t N = t.n;
  const double total = std::pow(static_cast<double>(N), 4);
  const bool exhaustive = total <= static_cast<double>(opt.budget);
  const std::size_t ne = eps.size();

  // exhaustive: one work unit per w with the full product matrices of w;
  // sampled: one unit per random (w, x, z)
  const std::size_t units = exhaustive ? N : std::max<std::size_t>(1, static_cast<std::size_t>(opt.budget / N));
  const std::size_t block = exhaustive ? 1 : 4096;
  const std::size_t nblocks = (units + block - 1) / block;
  std::vector<std::vector<double>> best(nblocks, std::vector<double>(1 + ne, 0.0));

  auto gp = [&](std::size_t x, std::size_t y, std::size_t w) {
    return 0.5 * (t.mid[x * N + w] + t.mid[w * N + y] - t.mid[x * N + y]);
  };

  auto scan = [&](std::vector<double>& out, const double* gx, const double* gz,
                  const std::vector<const double*>& ex, const std::vector<const double*>& ez, double gxz) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y < N; ++y) m = std::max(m, std::min(gx[y], gz[y]));
    out[0] = std::max(out[0], m - gxz);
    for (std::size_t e = 0; e < ne; ++e) {
      const double exz = std::exp(-eps[e] * gxz);
      double mn = std::numeric_limits<double>::infinity();
      const double* a = ex[e];
      const double* c = ez[e];
      for (std::size_t y = 0; y < N; ++y) mn = std::min(mn, a[y] + c[y]);
      out[1 + e] = std::max(out[1 + e], exz - mn);
    }
  };

  parallel_blocks(units, block, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    auto& out = best[b];
    if (exhaustive) {
      // g[x][y] = <x|y>_w and its transpose, so both scans run along rows
      std::vector<double> g(N * N), gt(N * N);
      std::vector<std::vector<double>> e(ne, std::vector<double>(N * N)), et(ne, std::vector<double>(N * N));
      std::vector<const double*> ex(ne), ez(ne);
      for (std::size_t w = lo; w < hi; ++w) {
        for (std::size_t x = 0; x < N; ++x)
          for (std::size_t y = 0; y < N; ++y) {
            const double v = gp(x, y, w);
            g[x * N + y] = v;
            gt[y * N + x] = v;
            for (std::size_t k = 0; k < ne; ++k) {
              const double ev = std::exp(-eps[k] * v);
              e[k][x * N + y] = ev;
              et[k][y * N + x] = ev;
            }
          }
        for (std::size_t x = 0; x < N; ++x)
          for (std::size_t z = 0; z < N; ++z) {
            for (std::size_t k = 0; k < ne; ++k) {
              ex[k] = &e[k][x * N];
              ez[k] = &et[k][z * N];
            }
            scan(out, &g[x * N], &gt[z * N], ex, ez, g[x * N + z]);
          }
      }
      return;
    }
    SplitMix64 rng(trial_seed(opt.seed, b));
    std::vector<double> gx(N), gz(N);
    std::vector<std::vector<double>> e1(ne, std::vector<double>(N)), e2(ne, std::vector<double>(N));
    std::vector<const double*> ex(ne), ez(ne);
    for (std::size_t u = lo; u < hi; ++u) {
      const std::size_t w = rng.below(N), x = rng.below(N), z = rng.below(N);
      for (std::size_t y = 0; y < N; ++y) {
        gx[y] = gp(x, y, w);
        gz[y] = gp(y, z, w);
        for (std::size_t k = 0; k < ne; ++k) {
          e1[k][y] = std::exp(-eps[k] * gx[y]);
          e2[k][y] = std::exp(-eps[k] * gz[y]);
        }
      }
      for (std::size_t k = 0; k < ne; ++k) {
        ex[k] = e1[k].data();
        ez[k] = e2[k].data();
      }
      scan(out, gx.data(), gz.data(), ex, ez, gp(x, z, w));
    }
  });

  HypScan r;
  r.eps = eps;
  const std::uint64_t count = exhaustive ? static_cast<std::uint64_t>(N) * N * N * N
                                         : static_cast<std::uint64_t>(units) * N;
  r.delta.exhaustive = exhaustive;
  r.delta.quadruples = count;
  r.delta.slack = 3.0 * t.max_width;
  for (const auto& b : best) r.delta.value = std::max(r.delta.value, b[0]);
  for (std::size_t e = 0; e < ne; ++e) {
    ScanResult s;
    s.exhaustive = exhaustive;
    s.quadruples = count;
    s.slack = 4.5 * eps[e] * t.max_width;
    for (const auto& b : best) s.value = std::max(s.value, b[1 + e]);
    r.strong.push_back(s);
  }
  return r;
}

inline ScanResult delta_hyperbolicity(const MetricPotential& psi, int n, const ScanOptions& opt = {}) {
  return hyperbolicity_scan(psi, n, {}, opt).delta;
}

inline ScanResult strong_hyp_defect(const MetricPotential& psi, double eps, int n, const ScanOptions& opt = {}) {
  return hyperbolicity_scan(psi, n, {eps}, opt).strong.at(0);
}

/// max |<g|h>^psi_w| over g, h in the ball of radius n and w on the tree
/// geodesic from g to h.
inline ScanResult hmp_gromov_bound(const MetricPotential& psi, int n) {
  const auto t = detail::pair_table(psi, n);
  const DenseBall ball(psi.rank(), n);
  const std::size_t N = t.n;
  std::vector<double> best(N, 0.0);
  parallel_for(N, [&](std::size_t i) {
    const Word g = ball.word_at(static_cast<std::int64_t>(i));
    for (std::size_t j = 0; j < N; ++j) {
      const Word h = ball.word_at(static_cast<std::int64_t>(j));
      const Word u = relative(g, h);
      Word w = g;
      for (std::size_t k = 0; k <= u.size(); ++k) {
        if (k > 0) w.push_back_reducing(u[k - 1]);
        const auto wi = static_cast<std::size_t>(ball.index_of(w));
        const double v = 0.5 * (t.mid[i * N + wi] + t.mid[wi * N + j] - t.mid[i * N + j]);
        best[i] = std::max(best[i], std::abs(v));
      }
    }
  });
  ScanResult r;
  r.quadruples = static_cast<std::uint64_t>(N) * N;
  r.slack = 1.5 * t.max_width;
  for (double b : best) r.value = std::max(r.value, b);
  return r;
}

struct BusemannResult {
  std::vector<Interval> values;  // k = 1..kmax
  std::optional<double> stable;  // set when the tail is constant
};

/// psi(x, g^k) - psi(o, g^k) for k = 1..kmax.
inline BusemannResult busemann_partial(const MetricPotential& psi, const Word& x, const Word& g, int kmax) {
  if (g.is_identity()) throw InvalidArgument("busemann_partial needs a nontrivial ray");
  require(kmax >= 1, "kmax must be >= 1");
  BusemannResult r;
  Word gk = identity(g.rank());
  for (int k = 1; k <= kmax; ++k) {
    gk = gk * g;
    r.values.push_back(psi.eval(x, gk) - psi.eval(gk));
  }
  const std::size_t n = r.values.size();
  const std::size_t tail = std::max<std::size_t>(2, n / 2);
  if (n >= 2) {
    bool flat = true;
    for (std::size_t i = n - std::min(n, tail); i + 1 < n; ++i)
      flat = flat && r.values[i].is_point() && r.values[i].lo == r.values[n - 1].lo;
    if (flat && r.values[n - 1].is_point()) r.stable = r.values[n - 1].lo;
  }
  return r;
}

}  // namespace hypgeo
