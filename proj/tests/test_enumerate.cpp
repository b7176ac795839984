#include <gtest/gtest.h>

#include <set>

#include "hypgeo/enumerate.hpp"

using namespace hypgeo;

TEST(Enumerate, BallCounts) {
  EXPECT_EQ(enumerate_ball(2, 1).size(), 5u);
  EXPECT_EQ(enumerate_ball(2, 2).size(), 17u);
  EXPECT_EQ(enumerate_ball(3, 2).size(), 37u);
  EXPECT_EQ(enumerate_ball(2, 0).size(), 1u);
}

TEST(Enumerate, SphereFormula) {
  for (int r = 2; r <= 3; ++r) {
    auto ball = enumerate_ball(r, 6);
    std::vector<std::uint64_t> counts(7, 0);
    for (const Word& w : ball) ++counts[w.size()];
    for (int n = 1; n <= 6; ++n) {
      std::uint64_t expect = 2 * r;
      for (int k = 1; k < n; ++k) expect *= 2 * r - 1;
      EXPECT_EQ(counts[static_cast<std::size_t>(n)], expect);
      EXPECT_EQ(sphere_size(r, n), expect);
    }
  }
}

TEST(Enumerate, BallOrderIsLengthLex) {
  auto ball = enumerate_ball(2, 5);
  for (std::size_t i = 1; i < ball.size(); ++i) EXPECT_LT(ball[i - 1], ball[i]);
  std::set<Word> uniq(ball.begin(), ball.end());
  EXPECT_EQ(uniq.size(), ball.size());
}

TEST(Enumerate, DenseBallStep) {
  DenseBall b(2, 5);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Word w = b.word_at(static_cast<std::int64_t>(i));
    EXPECT_EQ(dense_index(w), static_cast<std::int64_t>(i));
    for (Letter l : {Letter(1), Letter(-1), Letter(2), Letter(-2)}) {
      Word x = w;
      x.push_back_reducing(l);
      const auto j = b.step(static_cast<std::int64_t>(i), l);
      if (x.size() > 5)
        EXPECT_EQ(j, DenseBall::npos);
      else
        EXPECT_EQ(b.word_at(j), x);
    }
  }
}

TEST(Enumerate, ResourceCap) {
  EXPECT_THROW(enumerate_ball(2, 30), ResourceLimit);
  EXPECT_THROW(DenseBall(2, 10, 1000), ResourceLimit);
}

TEST(Enumerate, Classes) {
  EXPECT_EQ(enumerate_classes(2, 1).size(), 4u);
  EXPECT_EQ(enumerate_classes(2, 2).size(), 12u);
  // brute rotation dedup over all cyclically reduced words
  for (int n = 1; n <= 6; ++n) {
    std::set<ConjClassRep> brute;
    for (const Word& w : enumerate_ball(2, n))
      if (!w.is_identity() && is_cyclically_reduced(w)) brute.insert(canonical_class(w));
    auto cls = enumerate_classes(2, n);
    EXPECT_EQ(cls.size(), brute.size()) << n;
    std::set<ConjClassRep> got(cls.begin(), cls.end());
    EXPECT_EQ(got, brute);
    for (std::size_t i = 1; i < cls.size(); ++i) EXPECT_LT(cls[i - 1], cls[i]);
    for (const auto& c : cls) {
      EXPECT_TRUE(is_cyclically_reduced(c.core()));
      EXPECT_EQ(canonical_class(c.core()), c);
    }
  }
  bool has_square = false;
  for (const auto& c : enumerate_classes(2, 2)) has_square |= format_class(c) == "aa";
  EXPECT_TRUE(has_square);
}
