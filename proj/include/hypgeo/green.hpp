#pragma once

// Green functions G(o, g) = sum_k mu^{*k}(g) of symmetric finitely supported
// walks, Green metrics d_mu(o, g) = -log(G(o, g) / G(o, o)), and translation
// lengths of Green metrics.
//
// Values on a ball come from the walk killed outside a larger ball of radius
// R. The reported interval is [lower, lower + tail] where
//   lower      = sum_{k <= K} of the killed distribution (a true lower bound),
//   time tail  = 1.5 max(q_K(g), q_{K-1}(g)) rho / (1 - rho), with rho the
//                square root of the last ratio of even return probabilities,
//   space tail = geometric extrapolation of the increments of runs at radii
//                R-2, R-1, R, inflated by 1.5.
// Both tails are heuristic.
//
// Translation lengths use an axis transfer operator: states are points within
// distance t of the axis of a cyclically reduced word c, modulo translation by
// c, and the length is the positive root theta of rho(P_theta) = 1 where
// P_theta weights each step by exp(theta * winding). Restricting the walk to
// the tube lowers G, so the root is an upper bound for the length that
// decreases with t.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "hypgeo/enumerate.hpp"
#include "hypgeo/interval.hpp"
#include "hypgeo/length.hpp"
#include "hypgeo/measure.hpp"
#include "hypgeo/parallel.hpp"
#include "hypgeo/potential.hpp"

namespace hypgeo {

struct GreenOptions {
  int extra = 7;          // killing radius R = radius + extra (>= 2)
  double eps_tail = 1e-6;  // stop once the time tail bound falls below this
  int kmax = 20000;        // hard cap on the number of steps
  int tube = 0;            // axis tube width; 0 picks one from `tube_budget`
  std::uint64_t tube_budget = 20'000;  // states per transfer operator
};

struct GreenEstimate {
  double lower = 0.0;
  double tail = 0.0;
  double time_tail = 0.0;
  double space_tail = 0.0;
  int K = 0;
  double rho_hat = 0.0;
  bool heuristic = true;
  bool converged = true;

  Interval interval() const { return {lower, round_up(lower + tail)}; }
};

/// Killed-walk Green function on a ball, restricted to the ball of `radius`.
struct GreenTable {
  int radius = 0;
  int R = 0;
  std::vector<double> lower, time_tail, space_tail;
  int K = 0;
  double rho_hat = 0.0;
  bool converged = true;

  GreenEstimate at(std::size_t i) const {
    GreenEstimate e;
    e.lower = lower[i];
    e.time_tail = time_tail[i];
    e.space_tail = space_tail[i];
    e.tail = e.time_tail + e.space_tail;
    e.K = K;
    e.rho_hat = rho_hat;
    e.converged = converged;
    return e;
  }
};

namespace detail {

struct KilledRun {
  std::vector<double> green;
  std::vector<double> time_tail;
  int K = 0;
  double rho_hat = 0.0;
  bool converged = true;
};

inline KilledRun killed_green(const FiniteMeasure& mu, int R, double eps, int kmax, std::size_t keep) {
  const DenseBall ball(mu.rank(), R);
  const std::size_t n = ball.size();
  std::vector<std::vector<Letter>> inv;
  for (const Word& s : mu.atoms()) {
    const Word i = invert(s);
    inv.emplace_back(i.letters().begin(), i.letters().end());
  }
  const auto& w = mu.weights();
  std::vector<double> q(n, 0.0), prev(n, 0.0), next(n, 0.0), green(n, 0.0);
  q[0] = 1.0;
  green[0] = 1.0;
  std::vector<double> ret{1.0};
  KilledRun out;
  out.converged = false;
  int k = 0;
  for (k = 1; k <= kmax; ++k) {
    parallel_for(
        n,
        [&](std::size_t j) {
          double acc = 0.0;
          for (std::size_t s = 0; s < inv.size(); ++s) {
            const std::int64_t h = ball.multiply(static_cast<std::int64_t>(j), inv[s]);
            if (h != DenseBall::npos) acc += w[s] * q[static_cast<std::size_t>(h)];
          }
          next[j] = acc;
        },
        4096);
    prev.swap(q);
    q.swap(next);
    for (std::size_t j = 0; j < n; ++j) green[j] += q[j];
    ret.push_back(q[0]);
    if (k % 2 == 0 && k >= 4 && ret[static_cast<std::size_t>(k) - 2] > 0) {
      const double rho = std::sqrt(q[0] / ret[static_cast<std::size_t>(k) - 2]);
      if (rho < 1.0) {
        double m = 0.0;
        for (std::size_t j = 0; j < keep; ++j) m = std::max({m, q[j], prev[j]});
        const double factor = 1.5 * rho / (1.0 - rho);
        if (m * factor < eps) {
          out.rho_hat = rho;
          out.converged = true;
          break;
        }
        out.rho_hat = rho;
      }
    }
  }
  out.K = std::min(k, kmax);
  const double factor = out.rho_hat < 1.0 ? 1.5 * out.rho_hat / (1.0 - out.rho_hat) : 0.0;
  out.green.assign(green.begin(), green.begin() + static_cast<std::ptrdiff_t>(keep));
  out.time_tail.resize(keep);
  for (std::size_t j = 0; j < keep; ++j) out.time_tail[j] = factor * std::max(q[j], prev[j]);
  return out;
}

}  // namespace detail

inline void require_symmetric(const FiniteMeasure& mu) {
  if (!mu.is_symmetric()) throw InvalidArgument("Green estimates need a symmetric measure (mu(g) = mu(g^-1))");
}

inline GreenTable green_table(const FiniteMeasure& mu, int radius, const GreenOptions& opt = {}) {
  require_symmetric(mu);
  require(radius >= 0, "radius must be >= 0");
  require(opt.extra >= 2, "GreenOptions::extra must be >= 2");
  const int R = radius + opt.extra;
  const std::size_t keep = ball_size(mu.rank(), radius);
  auto r0 = detail::killed_green(mu, R, opt.eps_tail, opt.kmax, keep);
  auto r1 = detail::killed_green(mu, R - 1, opt.eps_tail, opt.kmax, keep);
  auto r2 = detail::killed_green(mu, R - 2, opt.eps_tail, opt.kmax, keep);
  GreenTable t;
  t.radius = radius;
  t.R = R;
  t.K = r0.K;
  t.rho_hat = r0.rho_hat;
  t.converged = r0.converged;
  t.lower = r0.green;
  t.time_tail = r0.time_tail;
  t.space_tail.resize(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    const double d1 = r0.green[i] - r1.green[i];
    const double d2 = r1.green[i] - r2.green[i];
    if (d1 <= 0) {
      t.space_tail[i] = 0.0;
      continue;
    }
    double r = d2 > 0 ? d1 / d2 : 0.95;
    r = std::clamp(r, 0.0, 0.95);
    t.space_tail[i] = 1.5 * d1 * r / (1.0 - r) + 1.5 * r1.time_tail[i];
  }
  return t;
}

inline GreenEstimate green_function(const FiniteMeasure& mu, const Word& g, const GreenOptions& opt = {}) {
  const auto t = green_table(mu, static_cast<int>(g.size()), opt);
  return t.at(static_cast<std::size_t>(dense_index(g)));
}

/// -log(G(o,g)/G(o,o)) from the two estimates, lower end clipped at 0.
inline Interval green_metric_interval(const GreenEstimate& at_g, const GreenEstimate& at_o) {
  const Interval ratio = at_g.interval() / at_o.interval();
  Interval d = -log(ratio);
  d.lo = std::max(0.0, d.lo);
  d.hi = std::max(0.0, d.hi);
  return d;
}

inline Interval green_metric(const FiniteMeasure& mu, const Word& g, const GreenOptions& opt = {}) {
  const auto t = green_table(mu, static_cast<int>(g.size()), opt);
  return green_metric_interval(t.at(static_cast<std::size_t>(dense_index(g))), t.at(0));
}

// --- axis transfer operator -----------------------------------------------------

struct AxisRoots {
  double plus = 0.0;   // length of [c]
  double minus = 0.0;  // length of [c^-1]
  int tube = 0;
  std::size_t states = 0;
  std::size_t transitions = 0;
  bool converged = true;
};

namespace detail {

class AxisOperator {
 public:
  AxisOperator(const FiniteMeasure& mu, const Word& c, int t) : m_(static_cast<int>(c.size())), tails_(c.rank(), t) {
    require(m_ >= 1 && is_cyclically_reduced(c), "axis needs a cyclically reduced word");
    c_.assign(c.letters().begin(), c.letters().end());
    const std::size_t Y = tails_.size();
    state_of_.assign(static_cast<std::size_t>(m_) * Y, -1);
    for (int i = 0; i < m_; ++i) {
      const Letter fwd = axis(i), back = inverse(axis(i - 1));
      for (std::size_t y = 0; y < Y; ++y) {
        if (y > 0) {
          const Word w = tails_.word_at(static_cast<std::int64_t>(y));
          if (w[0] == fwd || w[0] == back) continue;
        }
        state_of_[static_cast<std::size_t>(i) * Y + y] = static_cast<std::int32_t>(pos_.size());
        pos_.push_back(i);
        tail_.push_back(static_cast<std::int64_t>(y));
      }
    }
    const std::size_t ns = pos_.size();
    row_.assign(ns + 1, 0);
    std::vector<Letter> buf;
    for (std::size_t st = 0; st < ns; ++st) {
      const Word y = tails_.word_at(tail_[st]);
      for (std::size_t a = 0; a < mu.size(); ++a) {
        long P = pos_[st];
        buf.assign(y.letters().begin(), y.letters().end());
        for (Letter l : mu.atoms()[a].letters()) {
          if (!buf.empty()) {
            if (buf.back() == inverse(l))
              buf.pop_back();
            else
              buf.push_back(l);
          } else if (l == inverse(axis(P - 1))) {
            --P;
          } else {
            buf.push_back(l);
          }
        }
        std::size_t drop = 0;
        while (drop < buf.size() && buf[drop] == axis(P)) {
          ++drop;
          ++P;
        }
        if (buf.size() - drop > static_cast<std::size_t>(t)) continue;
        const std::int64_t yi = tails_.multiply(0, std::span<const Letter>(buf).subspan(drop));
        const long i = ((P % m_) + m_) % m_;
        const long j = (P - i) / m_;
        col_.push_back(state_of_[static_cast<std::size_t>(i) * Y + static_cast<std::size_t>(yi)]);
        weight_.push_back(mu.weights()[a]);
        wind_.push_back(static_cast<std::int32_t>(j));
        jmin_ = std::min<int>(jmin_, static_cast<int>(j));
        jmax_ = std::max<int>(jmax_, static_cast<int>(j));
      }
      row_[st + 1] = col_.size();
    }
    v_.assign(ns, 1.0);
  }

  std::size_t states() const { return pos_.size(); }
  std::size_t transitions() const { return col_.size(); }

  /// Spectral radius of P_theta by shifted power iteration with
  /// Collatz-Wielandt bounds; warm-started from the previous vector.
  double spectral_radius(double theta, bool* ok) {
    constexpr double shift = 0.5;
    std::vector<double> ex(static_cast<std::size_t>(jmax_ - jmin_ + 1));
    for (int j = jmin_; j <= jmax_; ++j) ex[static_cast<std::size_t>(j - jmin_)] = std::exp(theta * j);
    const std::size_t ns = states();
    std::vector<double> y(ns);
    double lo = 0, hi = 0;
    for (int it = 0; it < 5000; ++it) {
      parallel_for(
          ns,
          [&](std::size_t s) {
            double acc = shift * v_[s];
            for (std::size_t e = row_[s]; e < row_[s + 1]; ++e)
              acc += weight_[e] * ex[static_cast<std::size_t>(wind_[e] - jmin_)] * v_[static_cast<std::size_t>(col_[e])];
            y[s] = acc;
          },
          1024);
      lo = std::numeric_limits<double>::infinity();
      hi = 0;
      double mx = 0;
      for (std::size_t s = 0; s < ns; ++s) {
        const double r = y[s] / v_[s];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        mx = std::max(mx, y[s]);
      }
      for (std::size_t s = 0; s < ns; ++s) v_[s] = std::max(y[s] / mx, 1e-300);
      if (hi - lo <= 1e-11 * hi) {
        *ok = true;
        return 0.5 * (lo + hi) - shift;
      }
    }
    *ok = false;
    return 0.5 * (lo + hi) - shift;
  }

  /// Root of log rho(P_theta) = 0 on the side given by `sign`.
  double root(int sign, bool* ok) {
    auto f = [&](double th) {
      bool conv = true;
      const double r = spectral_radius(th, &conv);
      *ok = *ok && conv;
      return std::log(r);
    };
    *ok = true;
    double a = 0.0, fa = f(0.0);
    if (!(fa < 0)) throw NumericalFailure("transfer operator is not subcritical at theta = 0");
    double b = sign * 1.0, fb = f(b);
    while (fb <= 0) {
      a = b;
      fa = fb;
      b *= 2;
      if (std::abs(b) > 512) throw NumericalFailure("no root of the transfer operator found");
      fb = f(b);
    }
    // Illinois regula falsi on [a, b]
    int side = 0;
    for (int it = 0; it < 200 && std::abs(b - a) > 1e-10; ++it) {
      const double c = (a * fb - b * fa) / (fb - fa);
      const double fc = f(c);
      if (fc == 0) return c;
      if ((fc < 0) == (fa < 0)) {
        a = c;
        fa = fc;
        if (side == -1) fb *= 0.5;
        side = -1;
      } else {
        b = c;
        fb = fc;
        if (side == 1) fa *= 0.5;
        side = 1;
      }
    }
    return 0.5 * (a + b);
  }

 private:
  Letter axis(long p) const { return c_[static_cast<std::size_t>(((p % m_) + m_) % m_)]; }

  int m_;
  std::vector<Letter> c_;
  DenseBall tails_;
  std::vector<std::int32_t> state_of_;
  std::vector<int> pos_;
  std::vector<std::int64_t> tail_;
  std::vector<std::size_t> row_;
  std::vector<std::int32_t> col_;
  std::vector<double> weight_;
  std::vector<std::int32_t> wind_;
  int jmin_ = 0, jmax_ = 0;
  std::vector<double> v_;
};

}  // namespace detail

/// Tube width used by default: the largest t <= 9 whose operator has at
/// most `budget` states.
inline int auto_tube(const FiniteMeasure& mu, std::size_t m, std::uint64_t budget) {
  int t = 1;
  while (t < 9 && static_cast<double>(m) * static_cast<double>(ball_size(mu.rank(), t + 1)) <= static_cast<double>(budget))
    ++t;
  return t;
}

inline AxisRoots axis_roots(const FiniteMeasure& mu, const Word& core, int tube) {
  require_symmetric(mu);
  require(tube >= 0, "tube width must be >= 0");
  detail::AxisOperator op(mu, core, tube);
  AxisRoots r;
  r.tube = tube;
  r.states = op.states();
  r.transitions = op.transitions();
  bool ok1 = true, ok2 = true;
  r.plus = op.root(+1, &ok1);
  r.minus = -op.root(-1, &ok2);
  r.converged = ok1 && ok2;
  return r;
}

// --- Green potential ---------------------------------------------------------------

class GreenPotentialImpl : public PotentialImpl {
 public:
  GreenPotentialImpl(FiniteMeasure mu, int radius, GreenOptions opt)
      : mu_(std::move(mu)), opt_(opt), table_(green_table(mu_, radius, opt)) {}
  GreenPotentialImpl(FiniteMeasure mu, GreenTable table, GreenOptions opt)
      : mu_(std::move(mu)), opt_(opt), table_(std::move(table)) {}

  int rank() const override { return mu_.rank(); }
  const GreenTable& table() const noexcept { return table_; }
  const FiniteMeasure& measure() const noexcept { return mu_; }

  Interval eval(const Word& g) const override {
    if (static_cast<int>(g.size()) > table_.radius)
      throw OutOfRange("Green potential evaluated outside its ball of radius " + std::to_string(table_.radius));
    return green_metric_interval(table_.at(static_cast<std::size_t>(dense_index(g))), table_.at(0));
  }

  std::shared_ptr<const BallValues> ball(int n) const override {
    if (n > table_.radius)
      throw OutOfRange("Green potential ball of radius " + std::to_string(n) + " requested, cached radius is " +
                       std::to_string(table_.radius));
    return PotentialImpl::ball(n);
  }

  std::optional<LengthEntry> native_length(const ConjClassRep& cls) const override {
    {
      std::lock_guard lock(mutex_);
      if (auto it = lengths_.find(cls); it != lengths_.end()) return it->second;
    }
    // the pair {c, c^-1} is always computed from its smaller member
    const ConjClassRep inv = inverse_class(cls);
    const bool flip = inv < cls;
    const Word& c = flip ? inv.core() : cls.core();
    const int t = opt_.tube > 0 ? opt_.tube : auto_tube(mu_, c.size(), opt_.tube_budget);
    const AxisRoots hi = axis_roots(mu_, c, t);
    const AxisRoots lo = axis_roots(mu_, c, std::max(0, t - 1));
    auto entry = [](double at_t, double at_t1, bool conv) {
      LengthEntry e;
      e.value = e.upper = at_t;
      e.lower = at_t - std::abs(at_t1 - at_t);
      e.heuristic = true;
      e.certified = false;
      (void)conv;
      return e;
    };
    const LengthEntry ep = entry(hi.plus, lo.plus, hi.converged);
    const LengthEntry em = entry(hi.minus, lo.minus, hi.converged);
    std::lock_guard lock(mutex_);
    lengths_.emplace(flip ? inv : cls, ep);
    lengths_.emplace(flip ? cls : inv, em);
    return flip ? em : ep;
  }

 private:
  FiniteMeasure mu_;
  GreenOptions opt_;
  GreenTable table_;
  mutable std::mutex mutex_;
  mutable std::map<ConjClassRep, LengthEntry> lengths_;
};

/// Green metric d_mu as a potential, cached on the ball of `radius`.
inline PotentialPtr green_potential(const FiniteMeasure& mu, int radius, const GreenOptions& opt = {},
                                    std::string name = "d_mu") {
  require_symmetric(mu);
  return std::make_shared<MetricPotential>(name, mu.rank(), PotentialFlags{true, true, false},
                                           std::make_shared<GreenPotentialImpl>(mu, radius, opt));
}

/// Same, from a table computed earlier (for example loaded from a cache).
inline PotentialPtr green_potential(const FiniteMeasure& mu, GreenTable table, const GreenOptions& opt = {},
                                    std::string name = "d_mu") {
  require_symmetric(mu);
  require(table.lower.size() == ball_size(mu.rank(), table.radius), "Green table does not match its radius");
  return std::make_shared<MetricPotential>(name, mu.rank(), PotentialFlags{true, true, false},
                                           std::make_shared<GreenPotentialImpl>(mu, std::move(table), opt));
}

inline const GreenPotentialImpl* as_green(const MetricPotential& p) {
  return dynamic_cast<const GreenPotentialImpl*>(&p.impl());
}

}  // namespace hypgeo
