#include <gtest/gtest.h>

#include <cmath>

#include "hypgeo/moduli.hpp"

using namespace hypgeo;

namespace {
PotentialPtr s_prime() { return word_metric(extend_genset(standard_genset(2), {parse_word("ab", 2)}), "d_S'"); }
}  // namespace

TEST(Dilation, TrivialCases) {
  auto d = standard_metric(2);
  auto a = dil_lower(*d, *d, 4);
  EXPECT_EQ(*a.exact, Rational(1));
  auto b = dil_lower(*scaled(d, Rational(2)), *d, 4);
  EXPECT_EQ(*b.exact, Rational(2));
}

TEST(Dilation, GeneratingSetPair) {
  auto d = standard_metric(2);
  auto sp = s_prime();
  auto a = dil_lower(*d, *sp, 6);
  EXPECT_EQ(*a.exact, Rational(2));
  EXPECT_EQ(format_class(a.witness), "ab");
  EXPECT_TRUE(a.certified);
  auto b = dil_lower(*sp, *d, 6);
  EXPECT_EQ(*b.exact, Rational(1));
  EXPECT_NEAR(delta_dist(*d, *sp, 6), std::log(2.0), 1e-15);
  EXPECT_EQ(delta_dist(*d, *sp, 5), delta_dist(*sp, *d, 5));
  EXPECT_EQ(delta_dist(*d, *scaled(d, Rational(7, 3)), 5), 0.0);
  // monotone in maxlen
  EXPECT_LE(dil_lower(*d, *sp, 1).value, dil_lower(*d, *sp, 3).value);
}

TEST(StrongDistance, MatchesSweep) {
  auto d = standard_metric(2);
  auto sp = s_prime();
  EXPECT_EQ(strong_length_dist(*d, *d, *d, 4).value, 0.0);
  EXPECT_EQ(strong_length_dist(*scaled(d, Rational(3)), *d, *d, 4).value, 0.0);
  auto s = strong_length_dist(*d, *sp, *d, 6);
  // sweep: Dil(d, d) = 1, Dil(d_S', d) = 1, so the value is max (l_d - l_S') / l_d
  const auto classes = enumerate_classes(2, 6);
  auto ld = spectrum(*d, classes), ls = spectrum(*sp, classes);
  Rational best = 0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    Rational r = (*ld.entries[i].exact - *ls.entries[i].exact) / *ld.entries[i].exact;
    if (r < 0) r = -r;
    if (r > best) best = r;
  }
  ASSERT_TRUE(s.exact);
  EXPECT_EQ(*s.exact, best);
  EXPECT_EQ(*s.exact, Rational(1, 2));
}

TEST(Comparability, Constants) {
  auto d = standard_metric(2);
  EXPECT_EQ(comparability_C(*d, *d, 5, 4).C, 0.0);
  EXPECT_EQ(comparability_C(*scaled(d, Rational(2)), *d, 5, 4).C, 0.0);
  auto sp = s_prime();
  auto c = comparability_C(*d, *sp, 8, 6);
  EXPECT_TRUE(std::isfinite(c.C));
  // exhaustive oracle with the same dilations
  double brute = 0.0;
  for (const Word& g : enumerate_ball(2, 8)) {
    const double x = d->value(g), y = sp->value(g);
    brute = std::max({brute, y / c.dil_psi_phi - x, x - c.dil_phi_psi * y});
  }
  EXPECT_LE(c.C, brute);
  EXPECT_GE(c.C, brute - 1e-12);
}
