#pragma once

// Metric potentials g -> psi(o, g): word metrics, scaled copies and finite
// linear combinations. Values are intervals; exact potentials also expose
// rational values. Two-point values use left invariance,
// psi(g, h) = psi(o, g^-1 h).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hypgeo/enumerate.hpp"
#include "hypgeo/error.hpp"
#include "hypgeo/interval.hpp"
#include "hypgeo/rational.hpp"
#include "hypgeo/word.hpp"

namespace hypgeo {

// --- generating sets ---------------------------------------------------------

namespace detail {

/// Stallings folding of the petal graph of `words`. Returns true when the
/// generated subgroup contains every standard generator.
inline bool folds_to_bouquet(const std::vector<Word>& words, int rank) {
  const int nk = 2 * rank;
  std::vector<int> parent;
  std::vector<std::vector<int>> out;
  auto add_vertex = [&] {
    parent.push_back(static_cast<int>(parent.size()));
    out.emplace_back(static_cast<std::size_t>(nk), -1);
    return static_cast<int>(parent.size()) - 1;
  };
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  std::vector<std::pair<int, int>> pending;
  auto link = [&](int v, int key, int u) {
    int& slot = out[static_cast<std::size_t>(v)][static_cast<std::size_t>(key)];
    if (slot < 0)
      slot = u;
    else
      pending.emplace_back(slot, u);
  };
  auto add_edge = [&](int v, Letter l, int u) {
    link(v, letter_key(l), u);
    link(u, letter_key(inverse(l)), v);
  };
  auto settle = [&] {
    while (!pending.empty()) {
      auto [x, y] = pending.back();
      pending.pop_back();
      x = find(x);
      y = find(y);
      if (x == y) continue;
      parent[static_cast<std::size_t>(y)] = x;
      for (int k = 0; k < nk; ++k) {
        const int t = out[static_cast<std::size_t>(y)][static_cast<std::size_t>(k)];
        if (t >= 0) link(x, k, t);
      }
    }
  };
  add_vertex();
  for (const Word& w : words) {
    int v = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      int u = (i + 1 == w.size()) ? 0 : add_vertex();
      add_edge(v, w[i], u);
      v = u;
    }
    settle();
  }
  const int base = find(0);
  for (int k = 0; k < nk; ++k) {
    const int t = out[static_cast<std::size_t>(base)][static_cast<std::size_t>(k)];
    if (t < 0 || find(t) != base) return false;
  }
  return true;
}

}  // namespace detail

/// Finite symmetric generating set, sorted and duplicate free.
class GenSet {
 public:
  GenSet(int rank, std::vector<Word> words) : rank_(rank), words_(std::move(words)) {
    check_rank(rank);
    std::sort(words_.begin(), words_.end());
    words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
    for (const Word& w : words_) {
      if (w.rank() != rank) throw InvalidArgument("generating set word has the wrong rank");
      if (w.is_identity()) throw InvalidArgument("generating set contains the identity");
      max_length_ = std::max(max_length_, static_cast<int>(w.size()));
    }
    require(!words_.empty(), "generating set is empty");
    for (const Word& w : words_)
      if (!std::binary_search(words_.begin(), words_.end(), invert(w)))
        throw InvalidArgument("generating set is not symmetric: missing inverse of " + format_word(w));
    if (!detail::folds_to_bouquet(words_, rank)) throw InvalidArgument("set does not generate F_r");
    standard_ = (static_cast<int>(words_.size()) == 2 * rank && max_length_ == 1);
  }

  int rank() const noexcept { return rank_; }
  const std::vector<Word>& words() const noexcept { return words_; }
  std::size_t size() const noexcept { return words_.size(); }
  int max_length() const noexcept { return max_length_; }
  bool is_standard() const noexcept { return standard_; }

  std::string describe() const {
    std::string s;
    for (const Word& w : words_) {
      if (!s.empty()) s += ' ';
      s += format_word(w);
    }
    return s;
  }

 private:
  int rank_;
  std::vector<Word> words_;
  int max_length_ = 0;
  bool standard_ = false;
};

inline GenSet standard_genset(int rank) {
  std::vector<Word> w;
  for (int i = 1; i <= rank; ++i) {
    w.push_back(generator_word(rank, i, 1));
    w.push_back(generator_word(rank, i, -1));
  }
  return GenSet(rank, std::move(w));
}

/// Adds each word and its inverse.
inline GenSet extend_genset(const GenSet& s, const std::vector<Word>& extra) {
  std::vector<Word> w = s.words();
  for (const Word& x : extra) {
    w.push_back(x);
    w.push_back(invert(x));
  }
  return GenSet(s.rank(), std::move(w));
}

/// Words separated by whitespace or newlines; '#' starts a comment.
inline GenSet parse_genset(std::istream& in, int rank) {
  std::vector<Word> words;
  std::string line;
  while (std::getline(in, line)) {
    if (auto p = line.find('#'); p != std::string::npos) line.erase(p);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) words.push_back(parse_word(tok, rank));
  }
  return GenSet(rank, std::move(words));
}

inline GenSet load_genset(const std::string& path, int rank) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open generating set file " + path);
  return parse_genset(in, rank);
}

// --- exact layered BFS on the Cayley graph ------------------------------------

namespace detail {

/// Word packed into 128 bits: length in the low byte, letter keys above.
struct PackedWord {
  std::uint64_t lo = 0, hi = 0;
  friend bool operator==(const PackedWord&, const PackedWord&) = default;
  friend auto operator<=>(const PackedWord&, const PackedWord&) = default;
};

inline int key_bits(int rank) {
  int b = 1;
  while ((1 << b) < 2 * rank) ++b;
  return b;
}

inline PackedWord pack(std::span<const Letter> w, int bits) {
  const std::size_t cap = static_cast<std::size_t>(120 / bits);
  if (w.size() > cap) throw ResourceLimit("word too long for packed BFS keys");
  PackedWord p;
  p.lo = w.size();
  int pos = 8;
  for (Letter l : w) {
    const auto k = static_cast<std::uint64_t>(letter_key(l));
    if (pos < 64) {
      p.lo |= k << pos;
      if (pos + bits > 64) p.hi |= k >> (64 - pos);
    } else {
      p.hi |= k << (pos - 64);
    }
    pos += bits;
  }
  return p;
}

inline std::vector<Letter> unpack(const PackedWord& p, int bits) {
  const std::size_t n = p.lo & 0xff;
  std::vector<Letter> w(n);
  const std::uint64_t mask = (1ull << bits) - 1;
  int pos = 8;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t k;
    if (pos < 64) {
      k = p.lo >> pos;
      if (pos + bits > 64) k |= p.hi << (64 - pos);
    } else {
      k = p.hi >> (pos - 64);
    }
    w[i] = letter_from_key(static_cast<int>(k & mask));
    pos += bits;
  }
  return w;
}

inline void multiply_into(std::vector<Letter>& x, std::span<const Letter> s) {
  for (Letter l : s) {
    if (!x.empty() && x.back() == inverse(l))
      x.pop_back();
    else
      x.push_back(l);
  }
}

}  // namespace detail

/// Sphere sizes #{g : d_S(o, g) = k} for k = 0..n by exact layered BFS.
inline std::vector<std::uint64_t> word_sphere_counts(const GenSet& s, int n,
                                                      std::uint64_t cap = default_limits().max_elements) {
  require(n >= 0, "sphere radius must be >= 0");
  std::vector<std::uint64_t> counts{1};
  if (s.is_standard()) {
    for (int k = 1; k <= n; ++k) counts.push_back(sphere_size(s.rank(), k));
    return counts;
  }
  const int bits = detail::key_bits(s.rank());
  std::vector<detail::PackedWord> prev, cur{detail::pack({}, bits)};
  std::uint64_t total = 1;
  std::vector<Letter> buf;
  for (int k = 1; k <= n; ++k) {
    std::vector<detail::PackedWord> next;
    next.reserve(cur.size() * s.size());
    for (const auto& p : cur) {
      const auto base = detail::unpack(p, bits);
      for (const Word& g : s.words()) {
        buf = base;
        detail::multiply_into(buf, g.letters());
        next.push_back(detail::pack(buf, bits));
      }
      if (next.size() > 4 * cap) throw ResourceLimit("layered BFS exceeds the element cap");
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    std::vector<detail::PackedWord> fresh;
    fresh.reserve(next.size());
    for (const auto& p : next)
      if (!std::binary_search(cur.begin(), cur.end(), p) && !std::binary_search(prev.begin(), prev.end(), p))
        fresh.push_back(p);
    total += fresh.size();
    if (total > cap) throw ResourceLimit("layered BFS exceeds the element cap");
    counts.push_back(fresh.size());
    prev = std::move(cur);
    cur = std::move(fresh);
  }
  return counts;
}

// --- potentials ----------------------------------------------------------------

struct PotentialFlags {
  bool symmetric = false;
  bool pseudometric = false;
  bool exact = false;
};

/// One translation length with its certification status.
struct LengthEntry {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool certified = false;
  bool heuristic = false;
  std::optional<Rational> exact;
};

class MetricPotential;

struct Term {
  double coef = 0.0;
  std::optional<Rational> exact_coef;
  std::shared_ptr<const MetricPotential> base;
};

/// Values on a dense ball, in dense index order.
struct BallValues {
  int radius = 0;
  std::vector<double> lo, hi;
  bool exact = false;
  Interval at(std::size_t i) const { return {lo[i], hi[i]}; }
  double mid(std::size_t i) const { return 0.5 * (lo[i] + hi[i]); }
};

/// Value levels below a threshold, with multiplicities.
struct LevelCounts {
  std::vector<double> levels;
  std::vector<std::uint64_t> counts;
};

class PotentialImpl {
 public:
  virtual ~PotentialImpl() = default;
  virtual Interval eval(const Word& g) const = 0;
  virtual std::optional<Rational> exact(const Word&) const { return std::nullopt; }
  virtual std::shared_ptr<const BallValues> ball(int n) const {
    DenseBall b(rank(), n);
    auto out = std::make_shared<BallValues>();
    out->radius = n;
    out->lo.resize(b.size());
    out->hi.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      Interval v = eval(b.word_at(static_cast<std::int64_t>(i)));
      out->lo[i] = v.lo;
      out->hi[i] = v.hi;
    }
    return out;
  }
  /// psi(o, c^k) for k = 0..kmax.
  virtual std::vector<Interval> ray(const Word& c, int kmax) const {
    std::vector<Interval> v;
    for (int k = 0; k <= kmax; ++k) v.push_back(eval(power(c, k)));
    return v;
  }
  virtual std::optional<std::vector<Rational>> exact_ray(const Word&, int) const { return std::nullopt; }
  /// Translation length computed by a dedicated method, if any.
  virtual std::optional<LengthEntry> native_length(const ConjClassRep&) const { return std::nullopt; }
  virtual std::optional<LevelCounts> levels(double) const { return std::nullopt; }
  /// kappa with psi(o, g) >= kappa |g| for all g, or 0 when unknown.
  virtual double lipschitz_lower() const { return 0.0; }
  virtual const std::vector<Term>* terms() const { return nullptr; }
  virtual int rank() const = 0;
};

class MetricPotential {
 public:
  MetricPotential(std::string name, int rank, PotentialFlags flags, std::shared_ptr<const PotentialImpl> impl)
      : name_(std::move(name)), rank_(rank), flags_(flags), impl_(std::move(impl)) {}

  const std::string& name() const noexcept { return name_; }
  int rank() const noexcept { return rank_; }
  const PotentialFlags& flags() const noexcept { return flags_; }
  const PotentialImpl& impl() const noexcept { return *impl_; }

  Interval eval(const Word& g) const {
    if (g.rank() != rank_) throw InvalidArgument("rank mismatch in potential " + name_);
    if (g.is_identity()) return {0.0, 0.0};
    return impl_->eval(g);
  }
  Interval operator()(const Word& g) const { return eval(g); }
  /// psi(x, y) = psi(o, x^-1 y).
  Interval eval(const Word& x, const Word& y) const { return eval(relative(x, y)); }
  std::optional<Rational> exact(const Word& g) const {
    if (g.is_identity()) return Rational(0);
    return impl_->exact(g);
  }
  double value(const Word& g) const { return eval(g).mid(); }

 private:
  std::string name_;
  int rank_;
  PotentialFlags flags_;
  std::shared_ptr<const PotentialImpl> impl_;
};

using PotentialPtr = std::shared_ptr<const MetricPotential>;

// --- word metrics --------------------------------------------------------------

namespace detail {

/// Elements within distance `margin` of the tree segment [o, x], stored as
/// (position p on the segment, off-segment tail y). Index = p * B + index of y
/// in the ball of radius `margin`.
class Tube {
 public:
  Tube(const Word& x, int margin) : x_(x), margin_(margin), tails_(x.rank(), margin) {}

  std::size_t size() const { return (x_.size() + 1) * tails_.size(); }
  std::size_t node(std::size_t p, std::int64_t y) const { return p * tails_.size() + static_cast<std::size_t>(y); }

  /// Node of x[0, p) * y * s, or npos when it leaves the tube.
  std::int64_t step(std::size_t p, std::int64_t y, std::span<const Letter> s, std::vector<Letter>& buf) const {
    const Word tail = tails_.word_at(y);
    buf.assign(tail.letters().begin(), tail.letters().end());
    for (Letter l : s) {
      if (!buf.empty()) {
        if (buf.back() == inverse(l))
          buf.pop_back();
        else
          buf.push_back(l);
      } else if (p > 0 && x_[p - 1] == inverse(l)) {
        --p;
      } else {
        buf.push_back(l);
      }
    }
    std::size_t drop = 0;
    while (drop < buf.size() && p < x_.size() && buf[drop] == x_[p]) {
      ++drop;
      ++p;
    }
    if (buf.size() - drop > static_cast<std::size_t>(margin_)) return DenseBall::npos;
    const std::int64_t yi = tails_.multiply(0, std::span<const Letter>(buf).subspan(drop));
    return static_cast<std::int64_t>(node(p, yi));
  }

  std::size_t position(std::size_t node) const { return node / tails_.size(); }
  std::int64_t tail(std::size_t node) const { return static_cast<std::int64_t>(node % tails_.size()); }

 private:
  Word x_;
  int margin_;
  DenseBall tails_;
};

}  // namespace detail

class WordMetricImpl : public PotentialImpl {
 public:
  /// Balls up to this size are built as dense tables on demand.
  static constexpr std::uint64_t kAutoBall = 2'000'000;

  explicit WordMetricImpl(GenSet s) : s_(std::move(s)) {}

  int rank() const override { return s_.rank(); }
  const GenSet& genset() const noexcept { return s_; }
  int margin() const noexcept { return s_.max_length(); }

  Interval eval(const Word& g) const override {
    const double d = static_cast<double>(distance(g));
    return {d, d};
  }
  std::optional<Rational> exact(const Word& g) const override { return Rational(distance(g)); }

  std::int64_t distance(const Word& g) const {
    if (s_.is_standard()) return static_cast<std::int64_t>(g.size());
    const int n = static_cast<int>(g.size());
    {
      std::lock_guard lock(mutex_);
      if (table_ && n <= table_->radius) return static_cast<std::int64_t>(table_->lo[index_in(*table_, g)]);
    }
    if (ball_size(rank(), n + margin()) <= kAutoBall) {
      auto t = ball(n);
      return static_cast<std::int64_t>(t->lo[index_in(*t, g)]);
    }
    auto d = tube_distances(g);
    return d.back();
  }

  std::shared_ptr<const BallValues> ball(int n) const override {
    std::lock_guard lock(mutex_);
    if (table_ && table_->radius >= n) {
      if (table_->radius == n) return table_;
      auto cut = std::make_shared<BallValues>();
      const std::size_t sz = ball_size(rank(), n);
      cut->radius = n;
      cut->exact = true;
      cut->lo.assign(table_->lo.begin(), table_->lo.begin() + static_cast<std::ptrdiff_t>(sz));
      cut->hi = cut->lo;
      return cut;
    }
    table_ = build_ball(n);
    return table_;
  }

  std::vector<Interval> ray(const Word& c, int kmax) const override {
    auto d = ray_distances(c, kmax);
    std::vector<Interval> v;
    for (auto x : d) v.emplace_back(static_cast<double>(x));
    return v;
  }
  std::optional<std::vector<Rational>> exact_ray(const Word& c, int kmax) const override {
    std::vector<Rational> v;
    for (auto x : ray_distances(c, kmax)) v.emplace_back(x);
    return v;
  }

  std::optional<LevelCounts> levels(double tmax) const override {
    LevelCounts lc;
    const int n = static_cast<int>(std::ceil(tmax)) - 1;
    if (n < 0) return lc;
    auto counts = word_sphere_counts(s_, n);
    for (int k = 0; k <= n; ++k) {
      lc.levels.push_back(k);
      lc.counts.push_back(counts[static_cast<std::size_t>(k)]);
    }
    return lc;
  }

  double lipschitz_lower() const override { return 1.0 / margin(); }

  /// d_S(o, x[0, p)) for p = 0..|x|, by BFS in the tube of width margin.
  std::vector<std::int64_t> tube_distances(const Word& x) const {
    if (s_.is_standard()) {
      std::vector<std::int64_t> v(x.size() + 1);
      for (std::size_t p = 0; p <= x.size(); ++p) v[p] = static_cast<std::int64_t>(p);
      return v;
    }
    detail::Tube tube(x, margin());
    std::vector<std::int32_t> dist(tube.size(), -1);
    std::vector<std::size_t> frontier{tube.node(0, 0)}, next;
    dist[frontier[0]] = 0;
    std::size_t remaining = x.size();
    std::vector<Letter> buf;
    for (std::int32_t d = 0; !frontier.empty() && remaining > 0; ++d) {
      next.clear();
      for (std::size_t v : frontier) {
        for (const Word& s : s_.words()) {
          const std::int64_t u = tube.step(tube.position(v), tube.tail(v), s.letters(), buf);
          if (u == DenseBall::npos || dist[static_cast<std::size_t>(u)] >= 0) continue;
          dist[static_cast<std::size_t>(u)] = d + 1;
          if (tube.tail(static_cast<std::size_t>(u)) == 0) --remaining;
          next.push_back(static_cast<std::size_t>(u));
        }
      }
      frontier.swap(next);
    }
    if (remaining > 0) throw NumericalFailure("tube search did not reach every prefix");
    std::vector<std::int64_t> v(x.size() + 1);
    for (std::size_t p = 0; p <= x.size(); ++p) v[p] = dist[tube.node(p, 0)];
    return v;
  }

 private:
  std::vector<std::int64_t> ray_distances(const Word& c, int kmax) const {
    const Word x = power(c, kmax);
    auto d = tube_distances(x);
    std::vector<std::int64_t> out;
    const std::size_t m = c.size();
    for (int k = 0; k <= kmax; ++k) out.push_back(d[static_cast<std::size_t>(k) * m]);
    return out;
  }

  static std::size_t index_in(const BallValues&, const Word& g) { return static_cast<std::size_t>(dense_index(g)); }

  std::shared_ptr<BallValues> build_ball(int n) const {
    const DenseBall dom(rank(), n + margin());
    const std::size_t target = ball_size(rank(), n);
    std::vector<std::int16_t> dist(dom.size(), -1);
    dist[0] = 0;
    std::vector<std::int64_t> frontier{0}, next;
    std::size_t remaining = target - 1;
    for (std::int16_t d = 0; !frontier.empty() && remaining > 0; ++d) {
      next.clear();
      for (std::int64_t v : frontier) {
        for (const Word& s : s_.words()) {
          const std::int64_t u = dom.multiply(v, s.letters());
          if (u == DenseBall::npos || dist[static_cast<std::size_t>(u)] >= 0) continue;
          dist[static_cast<std::size_t>(u)] = static_cast<std::int16_t>(d + 1);
          if (static_cast<std::size_t>(u) < target) --remaining;
          next.push_back(u);
        }
      }
      frontier.swap(next);
    }
    if (remaining > 0) throw NumericalFailure("restricted search did not reach the whole ball");
    auto out = std::make_shared<BallValues>();
    out->radius = n;
    out->exact = true;
    out->lo.resize(target);
    for (std::size_t i = 0; i < target; ++i) out->lo[i] = dist[i];
    out->hi = out->lo;
    return out;
  }

  GenSet s_;
  mutable std::mutex mutex_;
  mutable std::shared_ptr<BallValues> table_;
};

/// Word metric d_S: exact graph distance in the Cayley graph of S.
inline PotentialPtr word_metric(const GenSet& s, std::string name = {}) {
  if (name.empty()) name = s.is_standard() ? "d_std" : "d_S";
  return std::make_shared<MetricPotential>(name, s.rank(), PotentialFlags{true, true, true},
                                           std::make_shared<WordMetricImpl>(s));
}

inline PotentialPtr standard_metric(int rank) { return word_metric(standard_genset(rank), "d_std"); }

inline const WordMetricImpl* as_word_metric(const MetricPotential& p) {
  return dynamic_cast<const WordMetricImpl*>(&p.impl());
}

// --- linear combinations -----------------------------------------------------------

class CombinationImpl : public PotentialImpl {
 public:
  explicit CombinationImpl(std::vector<Term> terms) : terms_(std::move(terms)) {
    require(!terms_.empty(), "combination needs at least one term");
    rank_ = terms_.front().base->rank();
    for (const Term& t : terms_)
      if (t.base->rank() != rank_) throw InvalidArgument("rank mismatch in combination");
  }

  int rank() const override { return rank_; }
  const std::vector<Term>* terms() const override { return &terms_; }

  Interval eval(const Word& g) const override {
    Interval sum(0.0);
    for (const Term& t : terms_) sum = sum + coef(t) * t.base->eval(g);
    return sum;
  }

  std::optional<Rational> exact(const Word& g) const override {
    Rational sum = 0;
    for (const Term& t : terms_) {
      if (!t.exact_coef) return std::nullopt;
      auto v = t.base->exact(g);
      if (!v) return std::nullopt;
      sum += *t.exact_coef * *v;
    }
    return sum;
  }

  std::shared_ptr<const BallValues> ball(int n) const override {
    auto out = std::make_shared<BallValues>();
    out->radius = n;
    out->exact = true;
    const std::size_t sz = ball_size(rank_, n);
    out->lo.assign(sz, 0.0);
    out->hi.assign(sz, 0.0);
    for (const Term& t : terms_) {
      auto b = t.base->impl().ball(n);
      out->exact = out->exact && b->exact && t.exact_coef.has_value();
      const Interval c = coef(t);
      for (std::size_t i = 0; i < sz; ++i) {
        Interval v = Interval(out->lo[i], out->hi[i]) + c * b->at(i);
        out->lo[i] = v.lo;
        out->hi[i] = v.hi;
      }
    }
    return out;
  }

  std::vector<Interval> ray(const Word& c, int kmax) const override {
    std::vector<Interval> sum(static_cast<std::size_t>(kmax) + 1, Interval(0.0));
    for (const Term& t : terms_) {
      auto r = t.base->impl().ray(c, kmax);
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = sum[k] + coef(t) * r[k];
    }
    return sum;
  }

  std::optional<LevelCounts> levels(double tmax) const override {
    // only a single positive multiple of a base potential has known levels
    if (terms_.size() != 1 || terms_[0].coef <= 0) return std::nullopt;
    const double c = terms_[0].coef;
    auto lc = terms_[0].base->impl().levels(tmax / c);
    if (!lc) return std::nullopt;
    for (double& l : lc->levels) l *= c;
    while (!lc->levels.empty() && lc->levels.back() >= tmax) {
      lc->levels.pop_back();
      lc->counts.pop_back();
    }
    return lc;
  }

  double lipschitz_lower() const override {
    double k = 0.0;
    for (const Term& t : terms_) {
      if (t.coef < 0) return 0.0;
      k += t.coef * t.base->impl().lipschitz_lower();
    }
    return k;
  }

 private:
  static Interval coef(const Term& t) { return Interval(t.coef); }

  std::vector<Term> terms_;
  int rank_ = 1;
};

inline Term make_term(double coef, PotentialPtr base) {
  Term t;
  t.coef = coef;
  t.base = std::move(base);
  if (std::isfinite(coef)) t.exact_coef = rational_from_double(coef);
  return t;
}

inline Term make_term(const Rational& coef, PotentialPtr base) {
  Term t;
  t.coef = to_double(coef);
  t.exact_coef = coef;
  t.base = std::move(base);
  return t;
}

/// Pointwise combination sum c_i psi_i. Pseudometric when all c_i >= 0.
inline PotentialPtr combination(std::vector<Term> terms, std::string name = {}) {
  PotentialFlags f{true, true, true};
  for (const Term& t : terms) {
    f.symmetric = f.symmetric && t.base->flags().symmetric;
    f.pseudometric = f.pseudometric && t.base->flags().pseudometric && t.coef >= 0;
    f.exact = f.exact && t.base->flags().exact && t.exact_coef.has_value();
  }
  if (name.empty()) {
    std::ostringstream os;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (i) os << " + ";
      os << terms[i].coef << '*' << terms[i].base->name();
    }
    name = os.str();
  }
  const int rank = terms.at(0).base->rank();
  return std::make_shared<MetricPotential>(name, rank, f, std::make_shared<CombinationImpl>(std::move(terms)));
}

inline PotentialPtr scaled(PotentialPtr p, double c) {
  require(c > 0, "scale factor must be positive");
  std::ostringstream os;
  os << c << '*' << p->name();
  return combination({make_term(c, std::move(p))}, os.str());
}

inline PotentialPtr scaled(PotentialPtr p, const Rational& c) {
  require(c > 0, "scale factor must be positive");
  std::string name = to_string(c) + "*" + p->name();
  return combination({make_term(c, std::move(p))}, name);
}

}  // namespace hypgeo
