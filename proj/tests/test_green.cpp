#include <gtest/gtest.h>

#include <cmath>

#include "hypgeo/green.hpp"

using namespace hypgeo;

namespace {
const double kLog3 = std::log(3.0);
}

TEST(Green, SimpleWalkValues) {
  auto mu = simple_random_walk(2);
  GreenOptions opt;
  opt.extra = 5;
  auto t = green_table(mu, 2, opt);
  EXPECT_TRUE(t.at(0).interval().contains(1.5));
  EXPECT_TRUE(t.at(1).interval().contains(0.5));
  EXPECT_TRUE(t.at(static_cast<std::size_t>(dense_index(parse_word("ab", 2)))).interval().contains(0.5 / 3));
  EXPECT_LT(t.at(0).tail, 1e-3);
  EXPECT_TRUE(green_metric(mu, parse_word("a", 2), opt).contains(kLog3));
  EXPECT_TRUE(green_metric(mu, parse_word("ab", 2), opt).contains(2 * kLog3));
}

TEST(Green, RejectsAsymmetric) {
  auto mu = FiniteMeasure::from_rational(2, {{parse_word("a", 2), Rational(1, 2)}, {parse_word("b", 2), Rational(1, 2)}});
  EXPECT_THROW(green_table(mu, 1), InvalidArgument);
  EXPECT_THROW(green_potential(mu, 1), InvalidArgument);
}

TEST(Green, PotentialOnBall) {
  auto mu = simple_random_walk(2);
  GreenOptions opt;
  opt.extra = 6;
  auto d = green_potential(mu, 4, opt);
  DenseBall b(2, 4);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Word g = b.word_at(static_cast<std::int64_t>(i));
    const Interval v = d->eval(g);
    EXPECT_TRUE(v.contains(kLog3 * static_cast<double>(g.size()))) << format_word(g);
    EXPECT_LT(v.width(), 2e-3);
  }
  EXPECT_THROW(d->eval(parse_word("ababa", 2)), OutOfRange);
}

TEST(Green, AxisLengthsOfSimpleWalk) {
  auto mu = simple_random_walk(2);
  for (const char* c : {"a", "ab", "aab", "abAB"}) {
    const Word w = parse_word(c, 2);
    const double exact = kLog3 * static_cast<double>(w.size());
    auto r6 = axis_roots(mu, w, 6);
    auto r7 = axis_roots(mu, w, 7);
    EXPECT_GE(r6.plus, r7.plus - 1e-9) << c;
    EXPECT_GE(r7.plus, exact - 1e-9) << c;
    EXPECT_NEAR(r7.plus, exact, 2e-3) << c;
    EXPECT_NEAR(r7.plus, r7.minus, 1e-9) << c;
  }
}

TEST(Green, NativeLengthInterval) {
  GreenOptions opt;
  opt.extra = 3;
  opt.tube = 7;
  auto d = green_potential(simple_random_walk(2), 1, opt);
  auto cls = canonical_class(parse_word("aab", 2));
  auto e = stable_length(*d, cls.core());
  EXPECT_TRUE(e.heuristic);
  EXPECT_LE(e.lower, 3 * kLog3);
  EXPECT_GE(e.upper, 3 * kLog3);
}

TEST(Green, RadialMeasureIsMultipleOfWordLength) {
  // uniform on a thickened sphere of the word metric: lengths are log3 |c|
  auto s = thickened_sphere(*standard_metric(2), 3.0, 2.5);
  ASSERT_EQ(s.set.size(), 52u);
  GreenOptions opt;
  opt.extra = 6;
  opt.tube = 4;
  auto d = green_potential(s.measure, 3, opt);
  EXPECT_LT(d->value(parse_word("ab", 2)), d->value(parse_word("aba", 2)));
  auto r = axis_roots(s.measure, parse_word("ab", 2), 4);
  EXPECT_NEAR(r.plus, 2 * kLog3, 2e-2);
}
