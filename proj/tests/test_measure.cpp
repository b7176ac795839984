#include <gtest/gtest.h>

#include <cmath>

#include "hypgeo/measure.hpp"

using namespace hypgeo;

TEST(Measure, RejectsBadInput) {
  EXPECT_THROW(FiniteMeasure::from_rational(2, {{parse_word("a", 2), Rational(1, 2)}}), InvalidArgument);
  EXPECT_THROW(FiniteMeasure::from_rational(2, {{parse_word("a", 2), Rational(-1)}, {parse_word("b", 2), Rational(2)}}),
               InvalidArgument);
  EXPECT_THROW(FiniteMeasure::from_double(2, {{parse_word("a", 2), 0.6}}, 1e-9), InvalidArgument);
}

TEST(Measure, SymmetryAndMerge) {
  auto mu = FiniteMeasure::from_rational(
      2, {{parse_word("a", 2), Rational(1, 4)}, {parse_word("a", 2), Rational(1, 4)}, {parse_word("A", 2), Rational(1, 2)}});
  EXPECT_EQ(mu.size(), 2u);
  EXPECT_TRUE(mu.is_symmetric());
  EXPECT_FALSE(point_mass(parse_word("ab", 2)).is_symmetric());
  EXPECT_TRUE(simple_random_walk(3).is_symmetric());
  EXPECT_EQ(simple_random_walk(3).size(), 6u);
}

TEST(Measure, ConvolutionOfSimpleWalk) {
  auto mu = simple_random_walk(2);
  auto two = convolve(mu, mu);
  ASSERT_TRUE(two.is_exact());
  EXPECT_EQ(two.size(), 13u);
  EXPECT_EQ(*two.exact_weight(identity(2)), Rational(1, 4));
  EXPECT_EQ(*two.exact_weight(parse_word("ab", 2)), Rational(1, 16));
  EXPECT_EQ(*two.exact_weight(parse_word("b", 2)), Rational(0));
}

TEST(Measure, FloatConvolutionMatchesExact) {
  auto mu = simple_random_walk(2);
  ConvolveOptions opt;
  opt.rational_threshold = 0;
  auto three = convolve(convolve(mu, mu, opt), mu, opt);
  auto exact = convolve(convolve(mu, mu), mu);
  ASSERT_EQ(three.size(), exact.size());
  for (std::size_t i = 0; i < exact.size(); ++i)
    EXPECT_NEAR(three.weight(exact.atoms()[i]), exact.weights()[i], 1e-15);
}

TEST(Measure, EntropyUpperBound) {
  auto h = entropy_upper(simple_random_walk(2), 3);
  EXPECT_NEAR(h[0], std::log(4.0), 1e-14);
  EXPECT_NEAR(h[1], 1.75 * std::log(2.0), 1e-14);
  EXPECT_LT(h[2], h[1]);
}

TEST(Measure, ThickenedSphere) {
  auto d = standard_metric(2);
  auto s = thickened_sphere(*d, 3.0, 1.5);
  EXPECT_EQ(s.set.size(), 48u);
  EXPECT_TRUE(s.measure.is_symmetric());
  EXPECT_EQ(thickened_sphere(*d, 5.0, 4.25).set.size(), 484u);
  EXPECT_EQ(thickened_sphere(*d, 6.0, 4.25).set.size(), 1452u);
  EXPECT_THROW(thickened_sphere(*d, 1.0, 2.0), InvalidArgument);
}

TEST(Measure, WalkIsDeterministic) {
  auto mu = simple_random_walk(2);
  auto a = sample_walk(mu, 50, 7), b = sample_walk(mu, 50, 7);
  EXPECT_EQ(a, b);
  for (std::size_t k = 1; k < a.size(); ++k) EXPECT_EQ(relative(a[k - 1], a[k]).size(), 1u);
}

TEST(Measure, DriftOfSimpleWalk) {
  auto mu = simple_random_walk(2);
  auto d = standard_metric(2);
  auto est = drift(mu, *d, 400, 400, 11);
  EXPECT_NEAR(est.mean, 0.5, 5 * est.stderr_ + 0.01);
  set_threads(3);
  auto again = drift(mu, *d, 400, 400, 11);
  set_threads(1);
  EXPECT_EQ(est.mean, again.mean);
}
