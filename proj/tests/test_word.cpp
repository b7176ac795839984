#include <gtest/gtest.h>

#include <random>
#include <set>

#include "hypgeo/word.hpp"

using namespace hypgeo;

namespace {

// Independent reducer: plain stack over (index, sign) pairs.
std::vector<std::pair<int, int>> stack_reduce(const std::vector<Generator>& gens) {
  std::vector<std::pair<int, int>> st;
  for (const auto& g : gens) {
    if (!st.empty() && st.back().first == g.index && st.back().second == -g.sign)
      st.pop_back();
    else
      st.emplace_back(g.index, g.sign);
  }
  return st;
}

Word random_word(std::mt19937_64& rng, int rank, int len) {
  std::uniform_int_distribution<int> idx(1, rank), sgn(0, 1);
  std::vector<Generator> g;
  for (int i = 0; i < len; ++i) g.push_back({idx(rng), sgn(rng) ? 1 : -1});
  return reduce(g, rank);
}

// All rotations of the cyclic core, compared as sets.
std::set<std::vector<Letter>> rotations(const Word& w) {
  Word c = cyclic_reduce(w).core;
  std::set<std::vector<Letter>> out;
  auto l = c.letters();
  for (std::size_t r = 0; r < l.size(); ++r) {
    std::vector<Letter> v(l.begin() + static_cast<std::ptrdiff_t>(r), l.end());
    v.insert(v.end(), l.begin(), l.begin() + static_cast<std::ptrdiff_t>(r));
    out.insert(v);
  }
  return out;
}

}  // namespace

TEST(Word, ReduceCancels) {
  EXPECT_TRUE(parse_word("aA", 2).is_identity());
  EXPECT_EQ(format_word(parse_word("abBa", 2)), "aa");
  std::vector<Generator> g{{1, 1}, {1, -1}};
  EXPECT_TRUE(reduce(g, 2).is_identity());
}

TEST(Word, ReduceMatchesStackOracle) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> idx(1, 3), sgn(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Generator> g;
    for (int i = 0; i < 20; ++i) g.push_back({idx(rng), sgn(rng) ? 1 : -1});
    Word w = reduce(g, 3);
    auto st = stack_reduce(g);
    ASSERT_EQ(w.size(), st.size());
    for (std::size_t i = 0; i < st.size(); ++i) EXPECT_EQ(w[i], st[i].first * st[i].second);
    EXPECT_EQ(reduce(std::vector<Generator>(), 3), identity(3));
  }
}

TEST(Word, ReduceRejectsIndexOutsideRank) {
  std::vector<Generator> g{{3, 1}};
  EXPECT_THROW(reduce(g, 2), InvalidArgument);
  EXPECT_THROW(parse_word("c", 2), InvalidArgument);
}

TEST(Word, MultiplyInvert) {
  EXPECT_EQ(format_word(parse_word("ab", 2) * parse_word("Ba", 2)), "aa");
  EXPECT_EQ(format_word(invert(parse_word("ab", 2))), "BA");
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    Word w = random_word(rng, 2, 15);
    EXPECT_TRUE((invert(w) * w).is_identity());
    EXPECT_TRUE((w * invert(w)).is_identity());
  }
  EXPECT_THROW(multiply(parse_word("a", 2), parse_word("a", 3)), InvalidArgument);
}

TEST(Word, LengthIsSubadditive) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    Word x = random_word(rng, 2, 10), y = random_word(rng, 2, 10);
    EXPECT_LE((x * y).size(), x.size() + y.size());
  }
}

TEST(Word, CyclicReduce) {
  auto d = cyclic_reduce(parse_word("baB", 2));
  EXPECT_EQ(format_word(d.core), "a");
  EXPECT_EQ(format_word(d.conjugator), "b");
  auto e = cyclic_reduce(parse_word("abAB", 2));
  EXPECT_EQ(format_word(e.core), "abAB");
  EXPECT_TRUE(e.conjugator.is_identity());
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    Word w = random_word(rng, 2, 12);
    auto c = cyclic_reduce(w);
    EXPECT_EQ(c.conjugator * c.core * invert(c.conjugator), w);
    EXPECT_TRUE(is_cyclically_reduced(c.core));
  }
}

TEST(Word, CanonicalClass) {
  EXPECT_EQ(format_class(canonical_class(parse_word("ba", 2))), "ab");
  EXPECT_EQ(format_class(canonical_class(parse_word("baB", 2))), "a");
  EXPECT_THROW(canonical_class(identity(2)), InvalidArgument);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    Word g = random_word(rng, 2, 8), h = random_word(rng, 2, 6);
    if (g.is_identity()) continue;
    EXPECT_EQ(canonical_class(g), canonical_class(h * g * invert(h)));
  }
}

TEST(Word, CanonicalClassSeparatesByRotationOracle) {
  // all nontrivial words of length <= 5 in rank 2
  std::vector<Word> all;
  std::vector<Word> frontier{identity(2)};
  for (int len = 1; len <= 5; ++len) {
    std::vector<Word> next;
    for (const Word& w : frontier)
      for (Letter l : {Letter(1), Letter(-1), Letter(2), Letter(-2)}) {
        if (!w.empty() && w.back() == inverse(l)) continue;
        Word x = w;
        x.push_back_reducing(l);
        next.push_back(x);
      }
    all.insert(all.end(), next.begin(), next.end());
    frontier = next;
  }
  std::vector<ConjClassRep> cls;
  std::vector<std::set<std::vector<Letter>>> rots;
  for (const Word& w : all) {
    cls.push_back(canonical_class(w));
    rots.push_back(rotations(w));
  }
  for (std::size_t i = 0; i < all.size(); i += 7)
    for (std::size_t j = 0; j < all.size(); ++j) EXPECT_EQ(cls[i] == cls[j], rots[i] == rots[j]);
}

TEST(Word, PrimitiveRoot) {
  auto p = primitive_root(canonical_class(parse_word("abab", 2)));
  EXPECT_EQ(format_class(p.root), "ab");
  EXPECT_EQ(p.multiplicity, 2);
  auto q = primitive_root(canonical_class(parse_word("aab", 2)));
  EXPECT_EQ(q.multiplicity, 1);
}

TEST(Word, TextFormat) {
  EXPECT_EQ(format_word(identity(2)), "e");
  EXPECT_TRUE(parse_word("e", 2).is_identity());
  EXPECT_TRUE(parse_word("1", 6).is_identity());
  EXPECT_EQ(parse_word("e", 6).size(), 1u);
  EXPECT_EQ(format_word(identity(6)), "1");
  EXPECT_THROW(parse_word("a-b", 2), InvalidArgument);
  EXPECT_EQ(format_word(parse_word("aBa", 2)), "aBa");
}

TEST(Word, Ordering) {
  EXPECT_LT(parse_word("B", 2), parse_word("aa", 2));
  EXPECT_LT(parse_word("a", 2), parse_word("A", 2));
  EXPECT_LT(parse_word("A", 2), parse_word("b", 2));
}
