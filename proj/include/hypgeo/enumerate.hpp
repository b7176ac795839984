#pragma once

// Balls, spheres and conjugacy-class lists of F_r, plus a dense index over
// the ball of radius R used by every table-based computation.

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hypgeo/error.hpp"
#include "hypgeo/word.hpp"

namespace hypgeo {

struct Limits {
  std::uint64_t max_elements = 40'000'000;  // dense balls, layered BFS, supports
  std::uint64_t max_quadruples = 2'000'000'000;
};

inline Limits& default_limits() {
  static Limits limits;
  return limits;
}

inline std::uint64_t sphere_size(int rank, int n) {
  check_rank(rank);
  if (n < 0) return 0;
  if (n == 0) return 1;
  std::uint64_t s = 2 * static_cast<std::uint64_t>(rank);
  for (int i = 1; i < n; ++i) {
    if (s > std::numeric_limits<std::uint64_t>::max() / (2 * rank)) return std::numeric_limits<std::uint64_t>::max();
    s *= static_cast<std::uint64_t>(2 * rank - 1);
  }
  return s;
}

inline std::uint64_t ball_size(int rank, int n) {
  std::uint64_t total = 0;
  for (int k = 0; k <= n; ++k) {
    std::uint64_t s = sphere_size(rank, k);
    if (s == std::numeric_limits<std::uint64_t>::max() || total > std::numeric_limits<std::uint64_t>::max() - s)
      return std::numeric_limits<std::uint64_t>::max();
    total += s;
  }
  return total;
}

/// Ball of radius R with elements indexed in length-then-lex order.
/// Right multiplication by a letter is O(1) on indices.
class DenseBall {
 public:
  static constexpr std::int64_t npos = -1;

  DenseBall(int rank, int radius, std::uint64_t cap = default_limits().max_elements)
      : rank_(rank), radius_(radius) {
    check_rank(rank);
    require(radius >= 0, "ball radius must be >= 0");
    const std::uint64_t total = ball_size(rank, radius);
    if (total > cap)
      throw ResourceLimit("ball of radius " + std::to_string(radius) + " in rank " + std::to_string(rank) +
                          " has " + std::to_string(total) + " elements, above cap " + std::to_string(cap));
    offset_.resize(static_cast<std::size_t>(radius) + 2);
    offset_[0] = 0;
    for (int n = 0; n <= radius; ++n) offset_[n + 1] = offset_[n] + sphere_size(rank, n);
    last_.assign(total, 0);
    len_.assign(total, 0);
    const std::int64_t q = 2 * rank - 1;
    for (int n = 1; n <= radius; ++n) {
      for (std::uint64_t i = offset_[n]; i < offset_[n + 1]; ++i) {
        const std::uint64_t pos = i - offset_[n];
        len_[i] = static_cast<std::uint8_t>(n);
        if (n == 1) {
          last_[i] = letter_from_key(static_cast<int>(pos));
        } else {
          const std::uint64_t parent = offset_[n - 1] + pos / static_cast<std::uint64_t>(q);
          const int digit = static_cast<int>(pos % static_cast<std::uint64_t>(q));
          last_[i] = letter_after(last_[parent], digit);
        }
      }
    }
  }

  int rank() const noexcept { return rank_; }
  int radius() const noexcept { return radius_; }
  std::size_t size() const noexcept { return last_.size(); }
  std::uint64_t sphere_begin(int n) const { return offset_[static_cast<std::size_t>(n)]; }
  std::uint64_t sphere_end(int n) const { return offset_[static_cast<std::size_t>(n) + 1]; }
  int length(std::int64_t idx) const { return len_[static_cast<std::size_t>(idx)]; }
  Letter last_letter(std::int64_t idx) const { return last_[static_cast<std::size_t>(idx)]; }

  std::int64_t parent(std::int64_t idx) const {
    const int n = length(idx);
    if (n <= 1) return 0;
    const std::uint64_t pos = static_cast<std::uint64_t>(idx) - offset_[n];
    return static_cast<std::int64_t>(offset_[n - 1] + pos / static_cast<std::uint64_t>(2 * rank_ - 1));
  }

  /// idx * l, or npos when the product leaves the ball.
  std::int64_t step(std::int64_t idx, Letter l) const {
    const int n = length(idx);
    if (n > 0 && last_letter(idx) == inverse(l)) return parent(idx);
    if (n >= radius_) return npos;
    if (n == 0) return static_cast<std::int64_t>(offset_[1]) + letter_key(l);
    const std::uint64_t pos = static_cast<std::uint64_t>(idx) - offset_[n];
    return static_cast<std::int64_t>(offset_[n + 1] + pos * static_cast<std::uint64_t>(2 * rank_ - 1) +
                                     static_cast<std::uint64_t>(digit_after(last_letter(idx), l)));
  }

  /// idx * s for a reduced word s. Intermediate points lie on the tree
  /// geodesic between the endpoints, so they stay inside the ball whenever
  /// both endpoints do.
  std::int64_t multiply(std::int64_t idx, std::span<const Letter> s) const {
    for (Letter l : s) {
      idx = step(idx, l);
      if (idx == npos) return npos;
    }
    return idx;
  }

  std::int64_t index_of(const Word& w) const {
    if (w.rank() != rank_) throw InvalidArgument("rank mismatch in DenseBall::index_of");
    if (static_cast<int>(w.size()) > radius_) return npos;
    return multiply(0, w.letters());
  }

  Word word_at(std::int64_t idx) const {
    const int n = length(idx);
    std::vector<Letter> letters(static_cast<std::size_t>(n));
    for (int k = n - 1; k >= 0; --k) {
      letters[static_cast<std::size_t>(k)] = last_letter(idx);
      idx = parent(idx);
    }
    Word w(rank_);
    for (Letter l : letters) w.push_back_reducing(l);
    return w;
  }

  static Letter letter_after(Letter prev, int digit) {
    const int excluded = letter_key(inverse(prev));
    return letter_from_key(digit >= excluded ? digit + 1 : digit);
  }
  static int digit_after(Letter prev, Letter l) {
    const int excluded = letter_key(inverse(prev));
    const int key = letter_key(l);
    return key > excluded ? key - 1 : key;
  }

 private:
  int rank_;
  int radius_;
  std::vector<std::uint64_t> offset_;
  std::vector<Letter> last_;
  std::vector<std::uint8_t> len_;
};

/// Dense index of w in any ball containing it, without building the ball.
inline std::int64_t dense_index(const Word& w) {
  const int n = static_cast<int>(w.size());
  if (n == 0) return 0;
  const std::uint64_t q = 2 * static_cast<std::uint64_t>(w.rank()) - 1;
  std::uint64_t pos = static_cast<std::uint64_t>(letter_key(w[0]));
  for (int i = 1; i < n; ++i)
    pos = pos * q + static_cast<std::uint64_t>(DenseBall::digit_after(w[static_cast<std::size_t>(i) - 1], w[static_cast<std::size_t>(i)]));
  return static_cast<std::int64_t>(ball_size(w.rank(), n - 1) + pos);
}

/// Reduced words of length <= n in length-then-lex order.
inline std::vector<Word> enumerate_ball(int rank, int n, std::uint64_t cap = default_limits().max_elements) {
  require(n >= 0, "enumerate_ball: n must be >= 0");
  DenseBall ball(rank, n, cap);
  std::vector<Word> out;
  out.reserve(ball.size());
  for (std::size_t i = 0; i < ball.size(); ++i) out.push_back(ball.word_at(static_cast<std::int64_t>(i)));
  return out;
}

namespace detail {

inline void classes_of_length(int rank, int len, std::vector<Letter>& buf, std::vector<ConjClassRep>& out) {
  const int pos = static_cast<int>(buf.size());
  if (pos == len) {
    if (len >= 2 && buf.front() == inverse(buf.back())) return;
    if (!is_least_rotation(buf)) return;
    Word w(rank);
    for (Letter l : buf) w.push_back_reducing(l);
    out.push_back(ConjClassRep::from_canonical_core(std::move(w)));
    return;
  }
  for (int key = 0; key < 2 * rank; ++key) {
    Letter l = letter_from_key(key);
    if (pos > 0 && buf.back() == inverse(l)) continue;
    // a least rotation never starts with a letter larger than any later one
    if (pos > 0 && letter_key(l) < letter_key(buf.front())) continue;
    buf.push_back(l);
    classes_of_length(rank, len, buf, out);
    buf.pop_back();
  }
}

}  // namespace detail

/// Conjugacy classes of [F_r]' whose cyclically reduced core has length
/// in [1, n], each once, in length-then-lex order of canonical cores.
inline std::vector<ConjClassRep> enumerate_classes(int rank, int n,
                                                   std::uint64_t cap = default_limits().max_elements) {
  check_rank(rank);
  require(n >= 1, "enumerate_classes: n must be >= 1");
  if (sphere_size(rank, n) > cap)
    throw ResourceLimit("enumerate_classes: length " + std::to_string(n) + " exceeds element cap");
  std::vector<ConjClassRep> out;
  std::vector<Letter> buf;
  for (int len = 1; len <= n; ++len) {
    buf.clear();
    detail::classes_of_length(rank, len, buf, out);
  }
  return out;
}

/// Classes with core length exactly n.
inline std::vector<ConjClassRep> enumerate_classes_of_length(int rank, int n) {
  check_rank(rank);
  require(n >= 1, "class length must be >= 1");
  std::vector<ConjClassRep> out;
  std::vector<Letter> buf;
  detail::classes_of_length(rank, n, buf, out);
  return out;
}

}  // namespace hypgeo
