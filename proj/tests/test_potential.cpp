#include <gtest/gtest.h>

#include <map>
#include <queue>
#include <random>

#include "hypgeo/diagnostics.hpp"
#include "hypgeo/length.hpp"
#include "hypgeo/potential.hpp"

using namespace hypgeo;

namespace {

GenSet s_prime() { return extend_genset(standard_genset(2), {parse_word("ab", 2)}); }

// Unrestricted BFS on the Cayley graph keyed by Word, up to `depth` layers.
std::map<Word, int> brute_bfs(const GenSet& s, int depth) {
  std::map<Word, int> dist;
  std::queue<Word> q;
  dist[identity(s.rank())] = 0;
  q.push(identity(s.rank()));
  while (!q.empty()) {
    Word x = q.front();
    q.pop();
    const int d = dist[x];
    if (d == depth) continue;
    for (const Word& g : s.words()) {
      Word y = x * g;
      if (dist.emplace(y, d + 1).second) q.push(y);
    }
  }
  return dist;
}

double ev(const PotentialPtr& p, const char* w) { return p->eval(parse_word(w, p->rank())).mid(); }

}  // namespace

TEST(GenSet, Validation) {
  EXPECT_NO_THROW(standard_genset(3));
  EXPECT_THROW(GenSet(2, {parse_word("a", 2), parse_word("b", 2), parse_word("B", 2)}), InvalidArgument);
  // symmetric but generates only <a, b^2>
  EXPECT_THROW(GenSet(2, {parse_word("a", 2), parse_word("A", 2), parse_word("bb", 2), parse_word("BB", 2)}),
               InvalidArgument);
  // {ab, b} generates
  EXPECT_NO_THROW(GenSet(2, {parse_word("ab", 2), parse_word("BA", 2), parse_word("b", 2), parse_word("B", 2)}));
  std::istringstream in("a A # comment\nb\nB\nab BA\n");
  EXPECT_EQ(parse_genset(in, 2).size(), 6u);
}

TEST(WordMetric, Examples) {
  auto d = standard_metric(2);
  EXPECT_EQ(ev(d, "abab"), 4);
  EXPECT_EQ(ev(d, "aBa"), 3);
  EXPECT_EQ(ev(d, "e"), 0);
  auto dp = word_metric(s_prime());
  EXPECT_EQ(ev(dp, "ab"), 1);
  EXPECT_EQ(ev(dp, "abab"), 2);
}

TEST(WordMetric, MatchesUnrestrictedBfs) {
  const GenSet s = s_prime();
  auto d = word_metric(s);
  auto brute = brute_bfs(s, 9);
  auto table = d->impl().ball(6);
  const DenseBall ball(2, 6);
  for (std::size_t i = 0; i < ball.size(); ++i) {
    const Word w = ball.word_at(static_cast<std::int64_t>(i));
    ASSERT_TRUE(brute.count(w)) << format_word(w);
    EXPECT_EQ(table->lo[i], brute[w]) << format_word(w);
  }
  // tube search agrees on long words
  const auto* wm = as_word_metric(*d);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    Word w = ball.word_at(static_cast<std::int64_t>(rng() % ball.size()));
    auto tube = wm->tube_distances(w);
    EXPECT_EQ(tube.back(), brute[w]);
  }
}

TEST(WordMetric, LongerGenerators) {
  const GenSet s(2, {parse_word("a", 2), parse_word("A", 2), parse_word("b", 2), parse_word("B", 2),
                     parse_word("aab", 2), parse_word("BAA", 2)});
  auto d = word_metric(s);
  auto brute = brute_bfs(s, 8);
  auto table = d->impl().ball(5);
  const DenseBall ball(2, 5);
  for (std::size_t i = 0; i < ball.size(); ++i) EXPECT_EQ(table->lo[i], brute[ball.word_at(static_cast<std::int64_t>(i))]);
}

TEST(WordMetric, SphereCounts) {
  auto c = word_sphere_counts(standard_genset(2), 5);
  EXPECT_EQ(c[3], 36u);
  const GenSet s = s_prime();
  auto counts = word_sphere_counts(s, 5);
  auto brute = brute_bfs(s, 5);
  std::vector<std::uint64_t> b(6, 0);
  for (auto& [w, d] : brute) ++b[static_cast<std::size_t>(d)];
  EXPECT_EQ(counts, b);
}

TEST(Gromov, Products) {
  auto d = standard_metric(2);
  const Word o = identity(2), a = parse_word("a", 2), b = parse_word("b", 2);
  EXPECT_EQ(gromov_product(*d, a, a, o).mid(), 1);
  EXPECT_EQ(gromov_product(*d, a, b, o).mid(), 0);
  EXPECT_EQ(gromov_product(*d, parse_word("ab", 2), parse_word("abb", 2), o).mid(), 2);
}

TEST(Gromov, DoubleDifferenceIdentities) {
  auto d = word_metric(s_prime());
  std::mt19937_64 rng(4);
  const DenseBall ball(2, 4);
  auto pick = [&] { return ball.word_at(static_cast<std::int64_t>(rng() % ball.size())); };
  for (int i = 0; i < 100; ++i) {
    Word a = pick(), b = pick(), x = pick(), y = pick(), c = pick();
    EXPECT_EQ(double_difference(*d, a, a, b, x).mid(), 0);
    EXPECT_EQ(gromov_product(*d, a, b, c).mid(), double_difference(*d, a, c, c, b).mid());
    EXPECT_EQ(double_difference(*d, a, b, x, y).mid(),
              (gromov_product(*d, b, x, a) - gromov_product(*d, b, y, a)).mid());
  }
  auto s = standard_metric(2);
  const Word o = identity(2), a = parse_word("a", 2), b = parse_word("b", 2), ab = parse_word("ab", 2);
  const double direct = 0.5 * (s->value(relative(o, b)) - s->value(relative(a, b)) - s->value(relative(o, ab)) +
                               s->value(relative(a, ab)));
  EXPECT_EQ(double_difference(*s, o, a, b, ab).mid(), direct);
}

TEST(Hyperbolicity, StandardMetricIsTreelike) {
  auto d = standard_metric(2);
  for (int n = 0; n <= 3; ++n) {
    auto r = hyperbolicity_scan(*d, n, {0.5, 1.0, 2.0});
    EXPECT_EQ(r.delta.value, 0.0);
    for (auto& s : r.strong) EXPECT_EQ(s.value, 0.0);
    EXPECT_TRUE(r.delta.exhaustive);
  }
}

TEST(Hyperbolicity, MatchesBruteForce) {
  auto d = word_metric(s_prime());
  const int n = 2;
  const DenseBall ball(2, n);
  std::vector<Word> w;
  for (std::size_t i = 0; i < ball.size(); ++i) w.push_back(ball.word_at(static_cast<std::int64_t>(i)));
  double best = 0, strong = 0;
  for (auto& x : w)
    for (auto& y : w)
      for (auto& z : w)
        for (auto& c : w) {
          const double xy = gromov_product(*d, x, y, c).mid(), yz = gromov_product(*d, y, z, c).mid(),
                       xz = gromov_product(*d, x, z, c).mid();
          best = std::max(best, std::min(xy, yz) - xz);
          strong = std::max(strong, std::exp(-xz) - std::exp(-xy) - std::exp(-yz));
        }
  auto r = hyperbolicity_scan(*d, n, {1.0});
  EXPECT_DOUBLE_EQ(r.delta.value, best);
  EXPECT_NEAR(r.strong[0].value, strong, 1e-12);
  EXPECT_LE(r.delta.value, delta_hyperbolicity(*d, 3).value);
}

TEST(Hyperbolicity, SampledModeIsDeterministic) {
  auto d = word_metric(s_prime());
  ScanOptions o;
  o.budget = 100000;
  auto a = hyperbolicity_scan(*d, 3, {1.0}, o);
  auto b = hyperbolicity_scan(*d, 3, {1.0}, o);
  EXPECT_FALSE(a.delta.exhaustive);
  EXPECT_EQ(a.delta.value, b.delta.value);
  EXPECT_LE(a.delta.value, delta_hyperbolicity(*d, 3).value);
}

TEST(Hmp, TreeMetrics) {
  EXPECT_EQ(hmp_gromov_bound(*standard_metric(2), 3).value, 0.0);
  EXPECT_EQ(hmp_gromov_bound(*scaled(standard_metric(2), 2.5), 3).value, 0.0);
  EXPECT_GT(hmp_gromov_bound(*word_metric(s_prime()), 3).value, 0.0);
}

TEST(Busemann, Rays) {
  auto d = standard_metric(2);
  const Word a = parse_word("a", 2);
  auto r0 = busemann_partial(*d, identity(2), a, 6);
  for (auto& v : r0.values) EXPECT_EQ(v.mid(), 0);
  auto r1 = busemann_partial(*d, a, a, 6);
  ASSERT_TRUE(r1.stable);
  EXPECT_EQ(*r1.stable, -1);
  auto r2 = busemann_partial(*d, parse_word("b", 2), a, 6);
  EXPECT_EQ(*r2.stable, 1);
}

TEST(StableLength, Examples) {
  auto d = standard_metric(2);
  auto e = stable_length(*d, parse_word("abAB", 2));
  EXPECT_TRUE(e.certified);
  EXPECT_EQ(e.value, 4);
  EXPECT_EQ(stable_length(*d, parse_word("abA", 2)).value, 1);
  auto two = scaled(d, Rational(2));
  auto f = stable_length(*two, parse_word("ab", 2));
  EXPECT_TRUE(f.certified);
  EXPECT_EQ(f.value, 4);
  EXPECT_THROW(stable_length(*d, identity(2)), InvalidArgument);
}

TEST(StableLength, WordMetricPrime) {
  auto dp = word_metric(s_prime());
  EXPECT_EQ(stable_length(*dp, parse_word("ab", 2)).value, 1);
  EXPECT_EQ(stable_length(*dp, parse_word("aB", 2)).value, 2);
  auto e = stable_length(*dp, parse_word("abb", 2));
  EXPECT_TRUE(e.certified);
  EXPECT_EQ(e.value, 2);
  // Fekete upper bound never below the certified value
  for (const auto& c : enumerate_classes(2, 4)) {
    auto x = stable_length(*dp, c.core());
    EXPECT_TRUE(x.certified) << format_class(c);
    for (int k = 1; k <= 6; ++k) EXPECT_LE(x.value, dp->value(power(c.core(), k)) / k + 1e-12);
  }
}

TEST(Spectrum, Linearity) {
  auto d = standard_metric(2);
  auto cls = enumerate_classes(2, 3);
  auto s = spectrum(*d, cls);
  for (std::size_t i = 0; i < cls.size(); ++i) {
    EXPECT_EQ(s.entries[i].value, static_cast<double>(cls[i].length()));
    EXPECT_EQ(s.at(inverse_class(cls[i])).value, s.entries[i].value);
  }
  auto combo = combination({make_term(Rational(2), d), make_term(Rational(-1), d)});
  auto sc = spectrum(*combo, cls);
  for (std::size_t i = 0; i < cls.size(); ++i) {
    EXPECT_EQ(sc.entries[i].value, s.entries[i].value);
    EXPECT_EQ(*sc.entries[i].exact, *s.entries[i].exact);
  }
  auto s3 = spectrum(*scaled(d, 3.0), cls);
  for (std::size_t i = 0; i < cls.size(); ++i) EXPECT_EQ(s3.entries[i].value, 3 * s.entries[i].value);
}
