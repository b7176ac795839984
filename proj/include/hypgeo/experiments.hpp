#pragma once

// Experiment recipes shared by the command-line tool and the acceptance
// runner. Each recipe returns a JSON report (config echo, results, checks)
// plus an optional CSV table. Reports contain no timing or thread count unless
// timing is requested, so equal configs give byte-identical reports.

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypgeo/currents.hpp"
#include "hypgeo/diagnostics.hpp"
#include "hypgeo/fundamental.hpp"
#include "hypgeo/green.hpp"
#include "hypgeo/growth.hpp"
#include "hypgeo/io.hpp"
#include "hypgeo/measure.hpp"
#include "hypgeo/moduli.hpp"

namespace hypgeo {

struct ExperimentConfig {
  int rank = 2;
  std::string gens;     // generating set file for the compared metric; empty: S plus ab
  std::string measure;  // measure file; empty: simple random walk
  std::optional<int> radius;
  std::optional<double> tmax;
  std::optional<int> maxlen;
  std::vector<double> l{5, 6};
  double delta = 4.25;
  double alpha = 0.0;
  int kmax = 16;
  std::uint64_t seed = 1;
  int trials = 200;
  int walk_steps = 100;
  double T = 10;
  std::vector<double> tgrid{-0.5, 0.0, 0.5};
  std::vector<double> Tgrid{2, 3, 4, 5, 6, 7, 8, 9, 10};
  double h = 0.05;
  double norm_tmax = 9;  // growth threshold used to normalize the compared metric
  double eps_tail = 1e-6;
  int extra = 7;
  int entropy_kmax = 2;
  std::vector<double> eps{0.5, 1.0, 2.0};
  bool self = false;
  // runtime only; never echoed
  std::string cache_dir;
  std::string out = "json";
  bool timing = false;
  int threads = 1;
};

inline Json config_json(const ExperimentConfig& c) {
  Json j;
  j["rank"] = c.rank;
  j["gens"] = c.gens;
  j["measure"] = c.measure;
  j["radius"] = c.radius ? Json(*c.radius) : Json();
  j["tmax"] = c.tmax ? Json(*c.tmax) : Json();
  j["maxlen"] = c.maxlen ? Json(*c.maxlen) : Json();
  j["l"] = c.l;
  j["delta"] = c.delta;
  j["alpha"] = c.alpha;
  j["kmax"] = c.kmax;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["walk_steps"] = c.walk_steps;
  j["T"] = c.T;
  j["tgrid"] = c.tgrid;
  j["Tgrid"] = c.Tgrid;
  j["h"] = c.h;
  j["norm_tmax"] = c.norm_tmax;
  j["eps_tail"] = c.eps_tail;
  j["extra"] = c.extra;
  j["entropy_kmax"] = c.entropy_kmax;
  j["eps"] = c.eps;
  j["self"] = c.self;
  return j;
}

/// Fields present in `j` override `c`.
inline void apply_json(ExperimentConfig& c, const Json& j) {
  auto opt_int = [&](const char* k, std::optional<int>& dst) {
    if (j.contains(k)) dst = j[k].is_null() ? std::nullopt : std::optional<int>(j[k].get<int>());
  };
  auto get = [&](const char* k, auto& dst) {
    if (j.contains(k) && !j[k].is_null()) dst = j[k].get<std::decay_t<decltype(dst)>>();
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char* known[] = {"rank", "gens", "measure", "radius", "tmax", "maxlen", "l", "delta", "alpha",
                                  "kmax", "seed", "trials", "walk_steps", "T", "tgrid", "Tgrid", "h", "norm_tmax",
                                  "eps_tail", "extra", "entropy_kmax", "eps", "self", "cache_dir", "out",
                                  "timing", "threads"};
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return it.key() == k; }) ==
        std::end(known))
      throw InvalidArgument("unknown config key '" + it.key() + "'");
  }
  get("rank", c.rank);
  get("gens", c.gens);
  get("measure", c.measure);
  opt_int("radius", c.radius);
  if (j.contains("tmax")) c.tmax = j["tmax"].is_null() ? std::nullopt : std::optional<double>(j["tmax"].get<double>());
  opt_int("maxlen", c.maxlen);
  get("l", c.l);
  get("delta", c.delta);
  get("alpha", c.alpha);
  get("kmax", c.kmax);
  get("seed", c.seed);
  get("trials", c.trials);
  get("walk_steps", c.walk_steps);
  get("T", c.T);
  get("tgrid", c.tgrid);
  get("Tgrid", c.Tgrid);
  get("h", c.h);
  get("norm_tmax", c.norm_tmax);
  get("eps_tail", c.eps_tail);
  get("extra", c.extra);
  get("entropy_kmax", c.entropy_kmax);
  get("eps", c.eps);
  get("self", c.self);
  get("cache_dir", c.cache_dir);
  get("out", c.out);
  get("timing", c.timing);
  get("threads", c.threads);
}

struct Report {
  Json json;
  std::vector<std::string> csv_header;
  Json csv_rows = Json::array();
  int exit_code = 0;

  Report(const std::string& id, const ExperimentConfig& c) {
    json["experiment"] = id;
    json["config"] = config_json(c);
    json["results"] = Json::object();
    json["checks"] = Json::array();
  }

  Json& results() { return json["results"]; }

  /// kind: exact | certified | heuristic. A failed check sets exit code 2.
  bool check(const std::string& name, bool pass, const std::string& kind, const std::string& safe_side,
             Json detail = Json::object()) {
    Json c;
    c["name"] = name;
    c["pass"] = pass;
    c["kind"] = kind;
    c["safe_side"] = safe_side;
    c["detail"] = std::move(detail);
    json["checks"].push_back(std::move(c));
    if (!pass) exit_code = 2;
    return pass;
  }

  void finish() { json["status"] = exit_code == 0 ? "pass" : "soft-failure"; }
};

// --- helpers --------------------------------------------------------------------------------

inline Json interval_json(const Interval& v) { return Json::array({v.lo, v.hi}); }

inline Json rational_json(const std::optional<Rational>& q) { return q ? Json(to_string(*q)) : Json(); }

inline std::string entry_kind(const LengthEntry& e) {
  if (e.exact) return "exact";
  return e.certified ? "certified" : "heuristic";
}

inline Json entry_json(const LengthEntry& e) {
  return Json{{"value", e.value}, {"lower", e.lower}, {"upper", e.upper}, {"exact", rational_json(e.exact)},
              {"certification", entry_kind(e)}};
}

inline GenSet compared_genset(const ExperimentConfig& c) {
  if (!c.gens.empty()) return load_genset(c.gens, c.rank);
  return extend_genset(standard_genset(c.rank), {parse_word("ab", c.rank)});
}

inline FiniteMeasure config_measure(const ExperimentConfig& c) {
  return c.measure.empty() ? simple_random_walk(c.rank) : load_measure(c.measure, c.rank);
}

inline GreenOptions green_options(const ExperimentConfig& c) {
  GreenOptions g;
  g.extra = c.extra;
  g.eps_tail = c.eps_tail;
  return g;
}

/// Simple random walk on the standard generators, exactly.
inline bool is_simple_random_walk(const FiniteMeasure& mu) {
  if (!mu.is_exact() || mu.size() != static_cast<std::size_t>(2 * mu.rank())) return false;
  const auto s = standard_genset(mu.rank());
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu.atoms()[i] != s.words()[i] || mu.exact_weights()[i] != Rational(1, 2 * mu.rank())) return false;
  return true;
}

inline bool is_uniform(const FiniteMeasure& mu) {
  if (!mu.is_exact()) return false;
  for (const auto& w : mu.exact_weights())
    if (w != mu.exact_weights().front()) return false;
  return true;
}

/// Green table through the cache.
inline GreenTable cached_green_table(const FiniteMeasure& mu, int radius, const GreenOptions& opt, Cache& cache) {
  Json key;
  key["rank"] = mu.rank();
  Json atoms = Json::array();
  for (std::size_t i = 0; i < mu.size(); ++i)
    atoms.push_back(Json::array({format_word(mu.atoms()[i]),
                                 mu.is_exact() ? to_string(mu.exact_weights()[i]) : Json(mu.weights()[i]).dump()}));
  key["measure"] = atoms;
  key["radius"] = radius;
  key["extra"] = opt.extra;
  key["eps_tail"] = opt.eps_tail;
  key["kmax"] = opt.kmax;
  const std::size_t n = ball_size(mu.rank(), radius);
  if (auto v = cache.load("green", key); v && v->size() == 3 * n + 4) {
    GreenTable t;
    t.radius = radius;
    t.R = static_cast<int>((*v)[0]);
    t.K = static_cast<int>((*v)[1]);
    t.rho_hat = (*v)[2];
    t.converged = (*v)[3] != 0.0;
    t.lower.assign(v->begin() + 4, v->begin() + 4 + static_cast<std::ptrdiff_t>(n));
    t.time_tail.assign(v->begin() + 4 + static_cast<std::ptrdiff_t>(n), v->begin() + 4 + 2 * static_cast<std::ptrdiff_t>(n));
    t.space_tail.assign(v->begin() + 4 + 2 * static_cast<std::ptrdiff_t>(n), v->end());
    return t;
  }
  auto t = green_table(mu, radius, opt);
  std::vector<double> v{static_cast<double>(t.R), static_cast<double>(t.K), t.rho_hat, t.converged ? 1.0 : 0.0};
  v.insert(v.end(), t.lower.begin(), t.lower.end());
  v.insert(v.end(), t.time_tail.begin(), t.time_tail.end());
  v.insert(v.end(), t.space_tail.begin(), t.space_tail.end());
  cache.store("green", key, v);
  return t;
}

// --- recipes ------------------------------------------------------------------------------

/// Sphere sizes of the standard ball (or of a word metric with --gens).
inline Report cmd_ball(const ExperimentConfig& c) {
  Report r("ball", c);
  const int n = c.radius.value_or(2);
  Cache cache(c.cache_dir);
  std::vector<std::uint64_t> counts;
  std::string kind = "exact";
  if (c.gens.empty()) {
    Json key{{"rank", c.rank}, {"radius", n}};
    if (auto v = cache.load("ball", key)) {
      for (double x : *v) counts.push_back(static_cast<std::uint64_t>(x));
    } else {
      const DenseBall ball(c.rank, n);
      for (int k = 0; k <= n; ++k) counts.push_back(ball.sphere_end(k) - ball.sphere_begin(k));
      cache.store("ball", key, std::vector<double>(counts.begin(), counts.end()));
    }
  } else {
    counts = word_sphere_counts(load_genset(c.gens, c.rank), n);
  }
  std::uint64_t total = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    total += counts[k];
    r.csv_rows.push_back(Json::array({k, counts[k]}));
  }
  r.csv_header = {"n", "count"};
  r.results()["sphere_counts"] = counts;
  r.results()["total"] = total;
  r.results()["certification"] = kind;
  if (c.gens.empty()) {
    bool ok = true;
    for (int k = 0; k <= n; ++k) ok = ok && counts[static_cast<std::size_t>(k)] == sphere_size(c.rank, k);
    r.check("sphere counts equal 2r(2r-1)^(n-1)", ok, "exact", "none");
  }
  r.finish();
  return r;
}

/// Number of cyclically reduced words of length n, from the trace of the
/// reduced-word transfer matrix.
inline BigInt cyclically_reduced_count(int rank, int n) {
  BigInt q = 2 * rank - 1, p = 1;
  for (int i = 0; i < n; ++i) p *= q;
  return p + 1 + BigInt(rank - 1) * (n % 2 == 0 ? 2 : 0);
}

/// Classes of length n by averaging fixed points over rotations.
inline BigInt class_count(int rank, int n) {
  BigInt sum = 0;
  for (int d = 1; d <= n; ++d) {
    if (n % d) continue;
    int phi = 0;
    for (int k = 1; k <= n / d; ++k) phi += std::gcd(k, n / d) == 1;
    sum += BigInt(phi) * cyclically_reduced_count(rank, d);
  }
  return sum / n;
}

inline Report cmd_classes(const ExperimentConfig& c) {
  Report r("classes", c);
  const int n = c.radius.value_or(4);
  const auto cls = enumerate_classes(c.rank, n);
  std::vector<std::uint64_t> per(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& k : cls) {
    ++per[k.length()];
    r.csv_rows.push_back(Json::array({format_class(k), k.length()}));
  }
  r.csv_header = {"class", "length"};
  r.results()["counts_by_length"] = per;
  r.results()["total"] = cls.size();
  r.results()["certification"] = "exact";
  bool ok = true;
  for (int k = 1; k <= n; ++k) ok = ok && BigInt(per[static_cast<std::size_t>(k)]) == class_count(c.rank, k);
  r.check("class counts equal the rotation-orbit count", ok, "exact", "none");
  r.finish();
  return r;
}

inline Report cmd_growth(const ExperimentConfig& c) {
  Report r("growth", c);
  const double tmax = c.tmax.value_or(12);
  const GenSet gens = c.gens.empty() ? standard_genset(c.rank) : load_genset(c.gens, c.rank);
  const auto metric = word_metric(gens);
  const auto counts = word_sphere_counts(gens, static_cast<int>(std::ceil(tmax)));
  const auto g = growth_rate(*metric, tmax);
  r.results()["sphere_counts"] = counts;
  r.results()["growth"] = Json{{"point", g.point}, {"lower", g.lower}, {"upper", g.upper}, {"Tmax", g.Tmax},
                               {"certification", "heuristic"}};
  for (std::size_t k = 0; k < counts.size(); ++k) r.csv_rows.push_back(Json::array({k, counts[k]}));
  r.csv_header = {"n", "count"};
  if (c.gens.empty()) {
    bool ok = true;
    for (std::size_t k = 0; k < counts.size(); ++k) ok = ok && counts[k] == sphere_size(c.rank, static_cast<int>(k));
    r.check("sphere counts equal 2r(2r-1)^(n-1)", ok, "exact", "none");
    const double v = std::log(2.0 * c.rank - 1);
    r.check("growth bracket contains log(2r-1)", g.contains(v), "heuristic", "bracket",
            Json{{"expected", v}, {"lower", g.lower}, {"upper", g.upper}});
    r.check("growth bracket width <= 0.05", g.width() <= 0.05, "heuristic", "bracket", Json{{"width", g.width()}});
  }
  r.finish();
  return r;
}

inline Report cmd_hyperbolicity(const ExperimentConfig& c) {
  Report r("hyperbolicity", c);
  const int n = c.radius.value_or(4);
  const auto metric = c.gens.empty() ? standard_metric(c.rank) : word_metric(load_genset(c.gens, c.rank));
  ScanOptions so;
  so.seed = c.seed;
  const auto scan = hyperbolicity_scan(*metric, n, c.eps, so);
  auto res = [](const ScanResult& s) {
    return Json{{"value", s.value}, {"slack", s.slack}, {"exhaustive", s.exhaustive}, {"quadruples", s.quadruples},
                {"certification", s.exhaustive ? "exact" : "heuristic"}};
  };
  r.results()["delta"] = res(scan.delta);
  Json strong = Json::array();
  for (std::size_t i = 0; i < scan.eps.size(); ++i) {
    Json e = res(scan.strong[i]);
    e["eps"] = scan.eps[i];
    strong.push_back(e);
    r.csv_rows.push_back(Json::array({scan.eps[i], scan.strong[i].value}));
  }
  r.results()["strong"] = strong;
  r.csv_header = {"eps", "defect"};
  if (c.gens.empty()) {
    r.check("delta = 0 on the tree", scan.delta.value <= scan.delta.slack, "exact", "value <= slack",
            res(scan.delta));
    for (std::size_t i = 0; i < scan.eps.size(); ++i)
      r.check("strong defect = 0 at eps " + Json(scan.eps[i]).dump(), scan.strong[i].value <= scan.strong[i].slack,
              "exact", "value <= slack", res(scan.strong[i]));
  }
  r.finish();
  return r;
}

/// Green function on a ball, with the tree oracle for the simple random walk
/// and the uniform-measure upper bound for d_mu.
inline Report cmd_green(const ExperimentConfig& c) {
  Report r("green", c);
  const int radius = c.radius.value_or(5);
  const auto mu = config_measure(c);
  require_symmetric(mu);
  Cache cache(c.cache_dir);
  const auto opt = green_options(c);
  const auto table = cached_green_table(mu, radius, opt, cache);
  const DenseBall ball(mu.rank(), radius);
  const auto at_o = table.at(0);
  r.results()["G_oo"] = interval_json(at_o.interval());
  r.results()["K"] = table.K;
  r.results()["rho_hat"] = table.rho_hat;
  r.results()["killing_radius"] = table.R;
  r.results()["converged"] = table.converged;
  r.results()["certification"] = "heuristic";
  double max_width = 0.0;
  std::vector<Interval> dvals;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    const auto e = table.at(i);
    const Interval d = green_metric_interval(e, at_o);
    dvals.push_back(d);
    max_width = std::max(max_width, d.width());
    r.csv_rows.push_back(Json::array({format_word(ball.word_at(static_cast<std::int64_t>(i))), e.interval().lo,
                                      e.interval().hi, table.K, table.rho_hat, true}));
  }
  r.csv_header = {"g", "lower", "upper", "K", "rho_hat", "heuristic"};
  r.results()["max_metric_width"] = max_width;
  if (is_simple_random_walk(mu)) {
    const int q = 2 * mu.rank() - 1;
    const double goo = static_cast<double>(q) / (q - 1);
    r.check("G(o,o) contains (2r-1)/(2r-2)", at_o.interval().contains(goo), "heuristic", "tail added to upper end",
            Json{{"expected", goo}, {"interval", interval_json(at_o.interval())}});
    bool contains = true, narrow = true;
    Json worst;
    for (std::size_t i = 0; i < ball.size(); ++i) {
      const double ex = std::log(static_cast<double>(q)) * ball.length(static_cast<std::int64_t>(i));
      if (!dvals[i].contains(ex) && contains) {
        contains = false;
        worst = Json{{"g", format_word(ball.word_at(static_cast<std::int64_t>(i)))}, {"interval", interval_json(dvals[i])},
                     {"expected", ex}};
      }
      narrow = narrow && dvals[i].width() <= 1e-3;
    }
    r.check("d_mu(o,g) contains |g| log(2r-1) on the ball", contains, "heuristic", "interval", worst);
    r.check("d_mu interval widths <= 1e-3", narrow, "heuristic", "interval", Json{{"max_width", max_width}});
  }
  if (is_uniform(mu)) {
    // d_mu(o,g) <= log(#S)|g|_S + log(G(o,o)(1 - 1/#S)), upper end of d_mu and lower end of G(o,o)
    std::optional<GenSet> s;
    try {
      s.emplace(mu.rank(), mu.atoms());
    } catch (const InvalidArgument&) {
    }
    if (s) {
      const auto ds = word_metric(*s);
      const auto vals = ds->impl().ball(radius);
      const double n = static_cast<double>(mu.size());
      const double cst = std::log(at_o.lower * (1 - 1 / n));
      bool ok = true;
      double margin = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < ball.size(); ++i) {
        const double bound = std::log(n) * vals->lo[i] + cst;
        margin = std::min(margin, bound - dvals[i].hi);
        ok = ok && dvals[i].hi <= bound;
      }
      r.check("uniform-measure bound d_mu <= log(#S)|g|_S + log(G(o,o)(1-1/#S))", ok, "heuristic",
              "upper end of d_mu, lower end of G(o,o)", Json{{"min_margin", margin}});
    }
  }
  r.finish();
  return r;
}

/// M = (l + ceil(a) + 1)(l - ceil(a)) / (ceil(a) - a + 1) + a.
inline double semigroup_constant(double l, double alpha) {
  const double ca = std::ceil(alpha);
  return (l + ca + 1) * (l - ca) / (ca - alpha + 1) + alpha;
}

/// Green metrics of uniform measures on thickened spheres of the standard
/// metric, compared with the metric itself along the l grid.
inline Report cmd_green_density(const ExperimentConfig& c) {
  Report r("green_density", c);
  const double ca = std::ceil(c.alpha);
  const double dmin = 2 * (ca + c.alpha + 2);
  if (!(c.delta > dmin))
    throw InvalidArgument("delta must exceed 2(ceil(alpha) + alpha + 2) = " + Json(dmin).dump());
  const int maxlen = c.maxlen.value_or(3);
  const int ball_n = c.radius.value_or(8);
  const auto d = standard_metric(c.rank);
  const auto classes = enumerate_classes(c.rank, maxlen);
  const auto sd = spectrum(*d, classes);
  GreenOptions gopt = green_options(c);
  Json rows = Json::array();
  std::vector<double> products;
  for (double l : c.l) {
    if (!(l > c.delta)) throw InvalidArgument("each l must exceed delta");
    const auto s = thickened_sphere(*d, l, c.delta);
    const auto dmu = green_potential(s.measure, 1, gopt);
    const auto sq = spectrum(*dmu, classes);
    const auto a = dil_lower(sq, sd, maxlen);  // Dil(d_mu, d)
    const auto b = dil_lower(sd, sq, maxlen);  // Dil(d, d_mu)
    const double product = a.value * b.value;
    const double bound = std::log(static_cast<double>(s.set.size())) / (l - ca);
    products.push_back(product);
    Json row{{"l", l},
             {"support", s.set.size()},
             {"dil_mu_d", a.value},
             {"witness_mu_d", format_class(a.witness)},
             {"dil_d_mu", b.value},
             {"witness_d_mu", format_class(b.witness)},
             {"product", product},
             {"delta_dist", std::log(product)},
             {"bound", bound},
             {"certification", "heuristic"}};
    r.check("Dil(d,d_mu) Dil(d_mu,d) >= 1 at l=" + Json(l).dump(), product >= 1.0 - 1e-12, "certified",
            "same class list on both sides", Json{{"product", product}});
    r.check("Dil(d_mu,d) <= log(#S_l)/(l - ceil(alpha)) at l=" + Json(l).dump(), a.value <= bound, "heuristic",
            "estimate is a lower bound of the true dilation", Json{{"dil", a.value}, {"bound", bound}});
    // (l - ceil(a))|g|_{S_l} - M <= d(o,g) <= l |g|_{S_l} on the ball
    const auto dl = word_metric(GenSet(c.rank, s.set), "d_S_l");
    const auto vl = dl->impl().ball(ball_n);
    const auto vd = d->impl().ball(ball_n);
    const double M = semigroup_constant(l, c.alpha);
    bool lower_ok = true, upper_ok = true;
    double max_sl = 0;
    for (std::size_t i = 0; i < vd->lo.size(); ++i) {
      lower_ok = lower_ok && (l - ca) * vl->lo[i] - M <= vd->lo[i];
      upper_ok = upper_ok && vd->lo[i] <= l * vl->lo[i];
      max_sl = std::max(max_sl, vl->lo[i]);
    }
    row["semigroup_M"] = M;
    row["max_length_S_l"] = max_sl;
    r.check("(l-ceil(alpha))|g|_S_l - M <= d(o,g) on ball " + std::to_string(ball_n) + " at l=" + Json(l).dump(),
            lower_ok, "exact", "none", Json{{"M", M}});
    r.check("d(o,g) <= l |g|_S_l on ball " + std::to_string(ball_n) + " at l=" + Json(l).dump(), upper_ok, "exact",
            "none");
    rows.push_back(row);
    r.csv_rows.push_back(Json::array({l, s.set.size(), a.value, b.value, product, bound}));
  }
  r.csv_header = {"l", "support", "dil_mu_d", "dil_d_mu", "product", "bound"};
  r.results()["rows"] = rows;
  bool trend = true;
  for (std::size_t i = 1; i < products.size(); ++i) trend = trend && products[i] <= products[i - 1] + 0.05;
  r.check("product nonincreasing along l within 0.05", trend, "heuristic", "slack 0.05");
  r.finish();
  return r;
}

inline Json distortion_json(const DistortionAverage& a) {
  return Json{{"value", a.value},   {"lower", a.lower},     {"upper", a.upper},
              {"exact", rational_json(a.exact)}, {"classes", a.classes}, {"T", a.T},
              {"maxlen", a.maxlen}, {"certification", a.exact ? "exact" : (a.certified ? "certified" : "heuristic")}};
}

inline Json slope_json(const DistortionSlope& s) {
  return Json{{"value", s.value},
              {"lower", s.lower},
              {"upper", s.upper},
              {"h", s.h},
              {"theta_minus", Json::array({s.minus.theta_lower, s.minus.theta, s.minus.theta_upper})},
              {"theta_plus", Json::array({s.plus.theta_lower, s.plus.theta, s.plus.theta_upper})},
              {"certification", "heuristic"}};
}

/// Mean distortion of the compared metric against the standard one, by class
/// averaging and by the slope of the Manhattan curve.
inline Report cmd_distortion(const ExperimentConfig& c) {
  Report r("distortion", c);
  const double tmax = c.tmax.value_or(12);
  const auto psi = standard_metric(c.rank);
  const auto phi = c.self ? psi : word_metric(compared_genset(c), "d_S'");
  const auto avg = mean_distortion_avg(*phi, *psi, c.T, c.maxlen.value_or(0));
  auto jt = joint_table(*phi, *psi, tmax);
  const auto slope = mean_distortion_slope(jt, c.h);
  const auto vpsi = growth_rate(*psi, tmax);
  const auto vphi = c.self ? vpsi : growth_rate(*phi, c.norm_tmax);
  const double tau_norm = avg.value * vphi.point / vpsi.point;
  r.results()["average"] = distortion_json(avg);
  r.results()["slope"] = slope_json(slope);
  r.results()["v_phi"] = Json{{"point", vphi.point}, {"lower", vphi.lower}, {"upper", vphi.upper}};
  r.results()["v_psi"] = Json{{"point", vpsi.point}, {"lower", vpsi.lower}, {"upper", vpsi.upper}};
  r.results()["tau_normalized"] = Json{{"value", tau_norm}, {"scale", vphi.point / vpsi.point},
                                       {"certification", "heuristic"}};
  r.csv_header = {"route", "value", "lower", "upper"};
  r.csv_rows.push_back(Json::array({"average", avg.value, avg.lower, avg.upper}));
  r.csv_rows.push_back(Json::array({"slope", slope.value, slope.lower, slope.upper}));
  const double gap = std::abs(avg.value - slope.value);
  const double allowed = avg.width() + slope.width() + 0.05;
  r.check("|average - slope| <= combined bracket + 0.05", gap <= allowed, "heuristic", "bracket widths added",
          Json{{"gap", gap}, {"allowed", allowed}});
  r.check("normalized tau >= 1 - 0.02", tau_norm >= 0.98, "heuristic", "point estimates of growth rates",
          Json{{"tau", tau_norm}});
  if (c.self) {
    r.check("self-pair average = 1", avg.exact && *avg.exact == 1, "exact", "none");
    r.check("self-pair slope = 1", std::abs(slope.value - 1) <= slope.width() + 1e-3, "heuristic", "bracket");
  }
  r.finish();
  return r;
}

/// Manhattan curve of a normalized pair; the self pair by default.
inline Report cmd_manhattan(const ExperimentConfig& c) {
  Report r("manhattan", c);
  const double tmax = c.tmax.value_or(12);
  const bool self = c.self || c.gens.empty();
  const auto npsi = normalize(standard_metric(c.rank), tmax);
  const auto nphi = self ? npsi : normalize(word_metric(compared_genset(c), "d_S'"), c.norm_tmax);
  auto jt = joint_table(*nphi.potential, *npsi.potential, tmax);
  const auto curve = manhattan_curve(jt, c.tgrid);
  r.results()["scale_phi"] = nphi.factor;
  r.results()["scale_psi"] = npsi.factor;
  r.results()["self_pair"] = self;
  Json samples = Json::array();
  for (const auto& s : curve.samples) {
    samples.push_back(Json{{"t", s.t}, {"theta", s.theta}, {"theta_lower", s.theta_lower},
                           {"theta_upper", s.theta_upper}, {"shift", s.shift}});
    r.csv_rows.push_back(Json::array({s.t, s.theta_lower, s.theta_upper}));
  }
  r.csv_header = {"t", "theta_lower", "theta_upper"};
  r.results()["samples"] = samples;
  r.results()["certification"] = "heuristic";
  r.check("curve decreasing within brackets", curve.decreasing, "heuristic", "bracket slack");
  r.check("curve convex within brackets", curve.convex, "heuristic", "bracket slack");
  if (self)
    for (const auto& s : curve.samples) {
      r.check("|theta(" + Json(s.t).dump() + ") - (1 - t)| <= bracket width", std::abs(s.theta - (1 - s.t)) <= s.width(),
              "heuristic", "bracket", Json{{"theta", s.theta}, {"width", s.width()}});
      r.check("bracket width <= 0.05 at t=" + Json(s.t).dump(), s.width() <= 0.05, "heuristic", "bracket",
              Json{{"width", s.width()}});
    }
  r.finish();
  return r;
}

inline Report cmd_moduli(const ExperimentConfig& c) {
  Report r("moduli", c);
  const int maxlen = c.maxlen.value_or(6);
  const auto psi = standard_metric(c.rank);
  const auto phi = word_metric(compared_genset(c), "d_S'");
  const auto classes = enumerate_classes(c.rank, maxlen);
  const auto sp = spectrum(*phi, classes), sq = spectrum(*psi, classes);
  const auto ab = dil_lower(sp, sq, maxlen), ba = dil_lower(sq, sp, maxlen);
  const double delta = delta_dist(sp, sq);
  const auto strong = strong_length_dist(sp, sq, sq);
  const auto comp = comparability_C(*phi, *psi, c.radius.value_or(8), ab.value, ba.value);
  r.results()["dil_ab"] = ab.value;
  r.results()["dil_ab_exact"] = rational_json(ab.exact);
  r.results()["dil_ba"] = ba.value;
  r.results()["dil_ba_exact"] = rational_json(ba.exact);
  r.results()["witness_ab"] = format_class(ab.witness);
  r.results()["witness_ba"] = format_class(ba.witness);
  r.results()["delta"] = delta;
  r.results()["maxlen"] = maxlen;
  r.results()["strong_length_dist"] = Json{{"value", strong.value}, {"exact", rational_json(strong.exact)},
                                           {"witness", format_class(strong.witness)}};
  r.results()["comparability_C"] = Json{{"C", comp.C}, {"witness", format_word(comp.witness)}, {"radius", comp.radius}};
  r.results()["certification"] = ab.exact && ba.exact ? "exact lower bounds" : "lower bounds";
  r.csv_header = {"quantity", "value"};
  for (const char* k : {"dil_ab", "dil_ba", "delta"}) r.csv_rows.push_back(Json::array({k, r.results()[k]}));
  r.check("Dil(phi,psi) Dil(psi,phi) >= 1", ab.value * ba.value >= 1 - 1e-12, "certified", "same classes");
  r.finish();
  return r;
}

inline Report cmd_lambda(const ExperimentConfig& c) {
  Report r("lambda", c);
  const auto psi = standard_metric(c.rank);
  const auto phi = c.self ? psi : word_metric(compared_genset(c), "d_S'");
  const auto rows = bms_ratio_convergence(*phi, *psi, c.Tgrid, c.maxlen.value_or(0));
  Json out = Json::array();
  bool ones = true, identity = true;
  for (const auto& row : rows) {
    ones = ones && row.psi_length.exact && *row.psi_length.exact == 1;
    identity = identity && row.identity_holds;
    out.push_back(Json{{"T", row.T},
                       {"N", row.classes},
                       {"value", row.phi_length.value},
                       {"exact", rational_json(row.phi_length.exact)},
                       {"psi_length", rational_json(row.psi_length.exact)},
                       {"average", row.average.value},
                       {"convergence", row.convergence},
                       {"primitive_N", row.primitive_classes},
                       {"primitive_value", row.primitive_value}});
    r.csv_rows.push_back(Json::array({row.T, row.classes, row.phi_length.value}));
  }
  r.csv_header = {"T", "N", "value"};
  r.results()["rows"] = out;
  r.results()["certification"] = "exact";
  r.check("l_psi(Lambda_T) = 1 exactly", ones, "exact", "none");
  r.check("currents path equals class average exactly", identity, "exact", "none");
  r.finish();
  return r;
}

inline Json fundamental_json(const FundamentalEstimate& f) {
  return Json{{"h_over_l", f.h_over_l},
              {"lower", f.lower},
              {"upper", f.upper},
              {"tau", distortion_json(f.tau)},
              {"drift", Json{{"mean", f.drift.mean}, {"stderr", f.drift.stderr_}, {"n", f.drift.n},
                             {"trials", f.drift.trials}}},
              {"entropy_upper", f.entropy_upper},
              {"entropy_over_drift_upper", std::isfinite(f.entropy_drift_upper) ? Json(f.entropy_drift_upper) : Json()},
              {"certification", "heuristic"}};
}

/// h/l for the simple random walk and for the thickened-sphere walks.
inline Report cmd_fundamental(const ExperimentConfig& c) {
  Report r("fundamental", c);
  const auto d = standard_metric(c.rank);
  const double vd = std::log(2.0 * c.rank - 1);
  FundamentalOptions fo;
  fo.maxlen = c.maxlen.value_or(3);
  fo.walk_steps = c.walk_steps;
  fo.trials = c.trials;
  fo.seed = c.seed;
  fo.entropy_kmax = c.entropy_kmax;
  fo.green = green_options(c);
  const auto srw = entropy_over_drift(simple_random_walk(c.rank), d, fo);
  r.results()["v_d"] = vd;
  r.results()["srw"] = fundamental_json(srw);
  r.csv_rows.push_back(Json::array({"srw", srw.h_over_l, srw.drift.mean, srw.entropy_upper.empty() ? Json() : Json(srw.entropy_upper.back())}));
  r.check("simple random walk h/l within 0.02 of log(2r-1)", std::abs(srw.h_over_l - vd) <= 0.02, "heuristic",
          "point estimate", Json{{"estimate", srw.h_over_l}, {"expected", vd}});
  Json rows = Json::array();
  std::vector<double> est;
  for (double l : c.l) {
    const auto s = thickened_sphere(*d, l, c.delta);
    FundamentalOptions lo = fo;
    lo.entropy_kmax = std::min(fo.entropy_kmax, 1);
    const auto f = entropy_over_drift(s.measure, d, lo);
    Json row = fundamental_json(f);
    row["l"] = l;
    row["support"] = s.set.size();
    rows.push_back(row);
    est.push_back(f.h_over_l);
    r.csv_rows.push_back(Json::array({"l=" + Json(l).dump(), f.h_over_l, f.drift.mean,
                                      f.entropy_upper.empty() ? Json() : Json(f.entropy_upper.back())}));
    r.check("h/l <= v_d + 0.02 at l=" + Json(l).dump(), f.h_over_l <= vd + 0.02, "heuristic", "point estimate",
            Json{{"estimate", f.h_over_l}, {"v_d", vd}});
  }
  r.results()["thickened"] = rows;
  bool trend = true;
  for (std::size_t i = 1; i < est.size(); ++i) trend = trend && est[i] >= est[i - 1] - 0.05;
  r.check("h/l nondecreasing along l within 0.05", trend, "heuristic", "slack 0.05");
  r.csv_header = {"walk", "h_over_l", "drift", "entropy_upper"};
  r.finish();
  return r;
}

using Recipe = std::function<Report(const ExperimentConfig&)>;

inline const std::map<std::string, Recipe>& recipes() {
  static const std::map<std::string, Recipe> m{
      {"ball", cmd_ball},           {"classes", cmd_classes},       {"growth", cmd_growth},
      {"hyperbolicity", cmd_hyperbolicity}, {"green", cmd_green},   {"green_density", cmd_green_density},
      {"distortion", cmd_distortion}, {"manhattan", cmd_manhattan}, {"moduli", cmd_moduli},
      {"lambda", cmd_lambda},       {"fundamental", cmd_fundamental}};
  return m;
}

/// Runs a recipe with the configured thread count; errors become a report
/// with exit code 1.
inline Report run_experiment(const std::string& name, const ExperimentConfig& c) {
  const auto it = recipes().find(name);
  if (it == recipes().end()) throw InvalidArgument("unknown experiment '" + name + "'");
  const int saved = threads();
  set_threads(c.threads);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Report r = it->second(c);
    if (c.timing)
      r.json["timing"] = Json{{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
                              {"threads", c.threads}};
    set_threads(saved);
    return r;
  } catch (const std::exception& e) {
    set_threads(saved);
    Report r(name, c);
    std::string type = "Error";
    if (dynamic_cast<const InvalidArgument*>(&e)) type = "InvalidArgument";
    if (dynamic_cast<const ResourceLimit*>(&e)) type = "ResourceLimit";
    if (dynamic_cast<const OutOfRange*>(&e)) type = "OutOfRange";
    if (dynamic_cast<const NumericalFailure*>(&e)) type = "NumericalFailure";
    r.json["error"] = Json{{"type", type}, {"message", e.what()}};
    r.json["status"] = "error";
    r.exit_code = 1;
    return r;
  }
}

inline std::string render(const Report& r, const std::string& format) {
  if (format == "csv" && !r.csv_header.empty() && r.exit_code != 1) {
    std::ostringstream os;
    write_csv(os, r.csv_header, r.csv_rows);
    return os.str();
  }
  return r.json.dump(2) + "\n";
}

}  // namespace hypgeo
