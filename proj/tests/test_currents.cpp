#include <gtest/gtest.h>

#include "hypgeo/currents.hpp"

using namespace hypgeo;

namespace {
PotentialPtr s_prime() { return word_metric(extend_genset(standard_genset(2), {parse_word("ab", 2)}), "d_S'"); }
ConjClassRep cls(const char* s) { return canonical_class(parse_word(s, 2)); }
}  // namespace

TEST(Currents, PowerRule) {
  auto a = rational_current(cls("a"));
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(*a.terms()[0].exact, Rational(1));
  auto a2 = rational_current(cls("aa"));
  EXPECT_EQ(a2.terms()[0].cls, cls("a"));
  EXPECT_EQ(*a2.terms()[0].exact, Rational(2));
  auto ab2 = rational_current(cls("abab"));
  EXPECT_EQ(ab2.terms()[0].cls, cls("ab"));
  EXPECT_EQ(*ab2.terms()[0].exact, Rational(2));
}

TEST(Currents, LengthIsLinear) {
  auto d = s_prime();
  RationalCombo c;
  c.add(cls("aab"), Rational(1, 3));
  c.add(cls("abAB"), Rational(2));
  auto single = eval_length(*d, rational_current(cls("aab")));
  EXPECT_EQ(*single.exact, *stable_length(*d, parse_word("aab", 2)).exact);
  RationalCombo both = c;
  both.add(rational_current(cls("bbA")));
  EXPECT_EQ(*eval_length(*d, both).exact,
            *eval_length(*d, c).exact + *eval_length(*d, rational_current(cls("bbA"))).exact);
  EXPECT_EQ(*eval_length(*scaled(d, Rational(2)), c).exact, 2 * *eval_length(*d, c).exact);
  EXPECT_THROW(c.add(cls("a"), Rational(-1)), InvalidArgument);
}

TEST(Lambda, StandardSmallT) {
  auto d = standard_metric(2);
  auto l = lambda_T(*d, 1.5);
  EXPECT_EQ(l.classes, 4u);
  ASSERT_EQ(l.combo.size(), 4u);
  for (const auto& t : l.combo.terms()) EXPECT_EQ(*t.exact, Rational(1, 4));
  EXPECT_EQ(*eval_length(*d, l.combo).exact, Rational(1));
  EXPECT_EQ(*eval_length(*scaled(d, Rational(2)), l.combo).exact, Rational(2));
  EXPECT_THROW(lambda_T(*d, 6, 3), InvalidArgument);
}

TEST(Lambda, ConvergenceTableIdentities) {
  auto d = standard_metric(2);
  auto rows = bms_ratio_convergence(*s_prime(), *d, {2, 3, 4, 5, 6, 7});
  for (const auto& r : rows) {
    ASSERT_TRUE(r.psi_length.exact);
    EXPECT_EQ(*r.psi_length.exact, Rational(1));
    EXPECT_TRUE(r.identity_holds);
    ASSERT_TRUE(r.average.exact);
    EXPECT_EQ(*r.phi_length.exact, *r.average.exact);
  }
  auto self = bms_ratio_convergence(*d, *d, {3, 5});
  for (const auto& r : self) EXPECT_EQ(*r.phi_length.exact, Rational(1));
  auto scaled_rows = bms_ratio_convergence(*scaled(d, Rational(5, 2)), *d, {3, 5});
  for (const auto& r : scaled_rows) EXPECT_EQ(*r.phi_length.exact, Rational(5, 2));
}

TEST(Lambda, InverseClassPairing) {
  auto d = standard_metric(2);
  auto sp = s_prime();
  auto l = lambda_T(*d, 6);
  RationalCombo inv;
  for (const auto& t : l.combo.terms()) inv.add(inverse_class(t.cls), *t.exact);
  EXPECT_EQ(*eval_length(*sp, l.combo).exact, *eval_length(*sp, inv).exact);
}
