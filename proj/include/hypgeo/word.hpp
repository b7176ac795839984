#pragma once

// Reduced words in the free group F_r and the conjugacy normal form.
//
// A letter is a signed generator index: +i is the i-th generator, -i its
// inverse (1 <= i <= r <= 26). The fixed alphabet order is
// a < A < b < B < ... (generator before its inverse), and every word order in
// the library is length first, then lexicographic in that alphabet order.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hypgeo/error.hpp"

namespace hypgeo {

using Letter = std::int8_t;

inline constexpr int kMaxRank = 26;

struct Generator {
  int index = 1;  // 1..rank
  int sign = 1;   // +1 or -1
};

constexpr Letter inverse(Letter l) noexcept { return static_cast<Letter>(-l); }

/// Position of a letter in the alphabet order a < A < b < B < ...
constexpr int letter_key(Letter l) noexcept {
  return l > 0 ? 2 * (l - 1) : 2 * (-l - 1) + 1;
}

constexpr Letter letter_from_key(int key) noexcept {
  return key % 2 == 0 ? static_cast<Letter>(key / 2 + 1) : static_cast<Letter>(-(key / 2 + 1));
}

inline void check_rank(int rank) {
  if (rank < 1 || rank > kMaxRank)
    throw InvalidArgument("rank must lie in [1, 26], got " + std::to_string(rank));
}

class Word {
 public:
  Word() = default;
  explicit Word(int rank) : rank_(rank) { check_rank(rank); }

  /// Freely reduces the letter sequence.
  static Word from_letters(std::span<const Letter> letters, int rank) {
    Word w(rank);
    w.letters_.reserve(letters.size());
    for (Letter l : letters) w.push_back_reducing(l);
    return w;
  }

  int rank() const noexcept { return rank_; }
  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  bool is_identity() const noexcept { return letters_.empty(); }
  std::span<const Letter> letters() const noexcept { return letters_; }
  Letter operator[](std::size_t i) const noexcept { return letters_[i]; }
  Letter front() const noexcept { return letters_.front(); }
  Letter back() const noexcept { return letters_.back(); }

  /// Right-multiplies by one letter, cancelling if needed.
  void push_back_reducing(Letter l) {
    int a = l < 0 ? -l : l;
    if (l == 0 || a > rank_)
      throw InvalidArgument("letter index " + std::to_string(a) + " outside rank " +
                            std::to_string(rank_));
    if (!letters_.empty() && letters_.back() == inverse(l))
      letters_.pop_back();
    else
      letters_.push_back(l);
  }

  Word prefix(std::size_t n) const {
    Word w(rank_);
    w.letters_.assign(letters_.begin(), letters_.begin() + static_cast<std::ptrdiff_t>(std::min(n, size())));
    return w;
  }

  Word suffix_from(std::size_t pos) const {
    Word w(rank_);
    if (pos < size()) w.letters_.assign(letters_.begin() + static_cast<std::ptrdiff_t>(pos), letters_.end());
    return w;
  }

  friend bool operator==(const Word& x, const Word& y) noexcept {
    return x.rank_ == y.rank_ && x.letters_ == y.letters_;
  }

  /// Length first, then lexicographic in the alphabet order.
  friend std::strong_ordering operator<=>(const Word& x, const Word& y) noexcept {
    if (x.size() != y.size()) return x.size() <=> y.size();
    for (std::size_t i = 0; i < x.size(); ++i) {
      int kx = letter_key(x.letters_[i]), ky = letter_key(y.letters_[i]);
      if (kx != ky) return kx <=> ky;
    }
    return x.rank_ <=> y.rank_;
  }

 private:
  friend Word multiply(const Word&, const Word&);
  friend Word invert(const Word&);
  int rank_ = 1;
  std::vector<Letter> letters_;
};

inline Word identity(int rank) { return Word(rank); }

inline Word generator_word(int rank, int index, int sign = 1) {
  Word w(rank);
  w.push_back_reducing(static_cast<Letter>(sign * index));
  return w;
}

/// Reduces a product of generators.
inline Word reduce(std::span<const Generator> gens, int rank) {
  check_rank(rank);
  Word w(rank);
  for (const Generator& g : gens) {
    if (g.index < 1 || g.index > rank)
      throw InvalidArgument("generator index " + std::to_string(g.index) + " outside rank " +
                            std::to_string(rank));
    if (g.sign != 1 && g.sign != -1) throw InvalidArgument("generator sign must be +1 or -1");
    w.push_back_reducing(static_cast<Letter>(g.sign * g.index));
  }
  return w;
}

inline Word multiply(const Word& x, const Word& y) {
  if (x.rank() != y.rank()) throw InvalidArgument("rank mismatch in multiply");
  std::size_t cancel = 0;
  const std::size_t nx = x.size(), ny = y.size();
  while (cancel < nx && cancel < ny && x.letters_[nx - 1 - cancel] == inverse(y.letters_[cancel])) ++cancel;
  Word w(x.rank());
  w.letters_.reserve(nx + ny - 2 * cancel);
  w.letters_.insert(w.letters_.end(), x.letters_.begin(), x.letters_.end() - static_cast<std::ptrdiff_t>(cancel));
  w.letters_.insert(w.letters_.end(), y.letters_.begin() + static_cast<std::ptrdiff_t>(cancel), y.letters_.end());
  return w;
}

inline Word operator*(const Word& x, const Word& y) { return multiply(x, y); }

inline Word invert(const Word& x) {
  Word w(x.rank());
  w.letters_.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) w.letters_[i] = inverse(x.letters_[x.size() - 1 - i]);
  return w;
}

inline Word power(const Word& x, int k) {
  Word base = k < 0 ? invert(x) : x;
  Word w(x.rank());
  for (int i = 0; i < (k < 0 ? -k : k); ++i) w = multiply(w, base);
  return w;
}

/// x^{-1} y, i.e. the element whose potential value gives psi(x, y).
inline Word relative(const Word& x, const Word& y) { return multiply(invert(x), y); }

inline bool is_cyclically_reduced(const Word& w) {
  return w.size() < 2 || w.front() != inverse(w.back());
}

struct CyclicDecomposition {
  Word core;
  Word conjugator;
};

/// w = conjugator * core * conjugator^{-1} with core cyclically reduced.
inline CyclicDecomposition cyclic_reduce(const Word& w) {
  std::size_t lo = 0, hi = w.size();
  while (hi - lo >= 2 && w[lo] == inverse(w[hi - 1])) {
    ++lo;
    --hi;
  }
  CyclicDecomposition d{Word(w.rank()), w.prefix(lo)};
  d.core = w.prefix(hi).suffix_from(lo);
  return d;
}

namespace detail {

inline std::size_t least_rotation(std::span<const Letter> s) {
  const std::size_t n = s.size();
  std::size_t best = 0;
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      int a = letter_key(s[(r + i) % n]), b = letter_key(s[(best + i) % n]);
      if (a != b) {
        if (a < b) best = r;
        break;
      }
    }
  }
  return best;
}

inline bool is_least_rotation(std::span<const Letter> s) {
  const std::size_t n = s.size();
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      int a = letter_key(s[(r + i) % n]), b = letter_key(s[i]);
      if (a != b) {
        if (a < b) return false;
        break;
      }
    }
  }
  return true;
}

}  // namespace detail

/// Conjugacy class of a nontrivial element: the lexicographically least
/// rotation of its cyclically reduced core.
class ConjClassRep {
 public:
  ConjClassRep() = default;

  /// Wraps a core that is already canonical; checked.
  static ConjClassRep from_canonical_core(Word core) {
    if (core.empty()) throw InvalidArgument("conjugacy class of the identity is excluded");
    if (!is_cyclically_reduced(core) || !detail::is_least_rotation(core.letters()))
      throw InvalidArgument("core is not a canonical class representative");
    ConjClassRep c;
    c.core_ = std::move(core);
    return c;
  }

  const Word& core() const noexcept { return core_; }
  int rank() const noexcept { return core_.rank(); }
  std::size_t length() const noexcept { return core_.size(); }

  friend bool operator==(const ConjClassRep&, const ConjClassRep&) = default;
  friend std::strong_ordering operator<=>(const ConjClassRep& x, const ConjClassRep& y) noexcept {
    return x.core_ <=> y.core_;
  }

 private:
  Word core_;
};

inline ConjClassRep canonical_class(const Word& w) {
  if (w.is_identity()) throw InvalidArgument("canonical_class: identity has no class in [F_r]'");
  Word core = cyclic_reduce(w).core;
  std::size_t r = detail::least_rotation(core.letters());
  std::vector<Letter> rot(core.size());
  for (std::size_t i = 0; i < core.size(); ++i) rot[i] = core[(r + i) % core.size()];
  return ConjClassRep::from_canonical_core(Word::from_letters(rot, w.rank()));
}

struct PrimitiveRoot {
  ConjClassRep root;
  int multiplicity = 1;
};

/// [g] = [h^m] with h primitive.
inline PrimitiveRoot primitive_root(const ConjClassRep& c) {
  const Word& core = c.core();
  const std::size_t n = core.size();
  for (std::size_t p = 1; p <= n; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = core[i] == core[i - p];
    if (periodic)
      return {ConjClassRep::from_canonical_core(core.prefix(p)), static_cast<int>(n / p)};
  }
  return {c, 1};
}

inline ConjClassRep inverse_class(const ConjClassRep& c) { return canonical_class(invert(c.core())); }

// --- text format: a..z generators, A..Z inverses, identity "e" ----------------

/// Identity spelling. For rank >= 5 the letter 'e' is a generator, so the
/// identity is written "1" there; "1" is accepted at every rank.
inline std::string identity_spelling(int rank) { return rank < 5 ? "e" : "1"; }

inline Word parse_word(std::string_view text, int rank) {
  check_rank(rank);
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  if (text == "1" || (text == "e" && rank < 5)) return Word(rank);
  if (text.empty()) throw InvalidArgument("empty word text");
  Word w(rank);
  for (char ch : text) {
    int idx;
    int sign;
    if (ch >= 'a' && ch <= 'z') {
      idx = ch - 'a' + 1;
      sign = 1;
    } else if (ch >= 'A' && ch <= 'Z') {
      idx = ch - 'A' + 1;
      sign = -1;
    } else {
      throw InvalidArgument(std::string("invalid letter '") + ch + "' in word");
    }
    if (idx > rank)
      throw InvalidArgument(std::string("letter '") + ch + "' outside rank " + std::to_string(rank));
    w.push_back_reducing(static_cast<Letter>(sign * idx));
  }
  return w;
}

inline std::string format_word(const Word& w) {
  if (w.is_identity()) return identity_spelling(w.rank());
  std::string s;
  s.reserve(w.size());
  for (Letter l : w.letters()) s.push_back(l > 0 ? static_cast<char>('a' + l - 1) : static_cast<char>('A' - l - 1));
  return s;
}

inline std::string format_class(const ConjClassRep& c) { return format_word(c.core()); }

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept {
    std::uint64_t h = 1469598103934665603ull ^ static_cast<std::uint64_t>(w.rank());
    for (Letter l : w.letters()) {
      h ^= static_cast<std::uint8_t>(l);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

struct ClassHash {
  std::size_t operator()(const ConjClassRep& c) const noexcept { return WordHash{}(c.core()); }
};

}  // namespace hypgeo
