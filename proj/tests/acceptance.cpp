// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Reports are produced at 4 threads, then reproduced at 1 thread and
// compared byte for byte.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "hypgeo/experiments.hpp"

using namespace hypgeo;

namespace {

struct Run {
  std::string name;
  ExperimentConfig config;
  Report report;
  double seconds;
};

Run run(const std::string& name, ExperimentConfig c, int threads) {
  c.threads = threads;
  const auto t0 = std::chrono::steady_clock::now();
  Report r = run_experiment(name, c);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {name, c, std::move(r), s};
}

/// Checks of a report whose name contains every fragment.
bool checks_pass(const Report& r, const std::vector<std::string>& fragments, std::string& why) {
  if (r.exit_code == 1) {
    why = r.json["error"]["message"].get<std::string>();
    return false;
  }
  bool any = false, ok = true;
  for (const auto& c : r.json["checks"]) {
    const std::string n = c["name"].get<std::string>();
    bool match = true;
    for (const auto& f : fragments) match = match && n.find(f) != std::string::npos;
    if (!match) continue;
    any = true;
    if (!c["pass"].get<bool>()) {
      ok = false;
      why += (why.empty() ? "" : "; ") + n + " " + c["detail"].dump();
    }
  }
  if (!any) why = "no matching checks";
  return any && ok;
}

bool within(double seconds, double limit, std::string& why) {
  if (seconds <= limit) return true;
  why += (why.empty() ? "" : "; ") + std::string("runtime ") + std::to_string(seconds) + " s above " +
         std::to_string(limit) + " s";
  return false;
}

int failures = 0;

void line(int k, bool pass, const std::string& what, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("criterion %2d: %s  %s%s%s\n", k, pass ? "PASS" : "FAIL", what.c_str(), detail.empty() ? "" : " | ",
              detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.6g", x);
  return b;
}

}  // namespace

int main() {
  constexpr int kThreads = 4;
  std::vector<Run> runs;

  // 1. SRW Green metric on ball 5
  {
    ExperimentConfig c;
    c.radius = 5;
    c.eps_tail = 1e-6;
    runs.push_back(run("green", c, kThreads));
    const auto& r = runs.back();
    std::string why;
    bool ok = checks_pass(r.report, {"d_mu"}, why);
    ok = within(r.seconds, 30, why) && ok;
    line(1, ok, "SRW Green metric contains |g| log 3 with width <= 1e-3 on ball 5",
         why.empty() ? "max width " + fmt(r.report.json["results"]["max_metric_width"].get<double>()) + ", " +
                           fmt(r.seconds) + " s"
                     : why);
  }
  const Report green_report = runs.back().report;

  // 2. sphere counts and growth bracket
  {
    ExperimentConfig c;
    c.tmax = 12;
    runs.push_back(run("growth", c, kThreads));
    const auto& r = runs.back();
    std::string why;
    bool ok = checks_pass(r.report, {}, why);
    ok = r.report.json["results"]["sphere_counts"].size() == 13 && ok;
    ok = within(r.seconds, 60, why) && ok;
    const auto& g = r.report.json["results"]["growth"];
    line(2, ok, "sphere counts 4*3^(n-1) for n <= 12, growth bracket contains log 3 with width <= 0.05",
         why.empty() ? "bracket [" + fmt(g["lower"].get<double>()) + ", " + fmt(g["upper"].get<double>()) + "]" : why);
  }

  // 3. hyperbolicity defects on ball 4
  {
    ExperimentConfig c;
    c.radius = 4;
    c.eps = {0.5, 1.0, 2.0};
    runs.push_back(run("hyperbolicity", c, kThreads));
    const auto& r = runs.back();
    std::string why;
    bool ok = checks_pass(r.report, {}, why);
    bool exhaustive = r.report.json["results"]["delta"]["exhaustive"].get<bool>();
    for (const auto& s : r.report.json["results"]["strong"]) exhaustive = exhaustive && s["exhaustive"].get<bool>();
    if (!exhaustive) why += "scan not exhaustive";
    ok = ok && exhaustive;
    ok = within(r.seconds, 120, why) && ok;
    line(3, ok, "delta = 0 and strong defects = 0 at eps 0.5, 1, 2, exhaustive over ball 4",
         why.empty() ? fmt(r.seconds) + " s" : why);
  }

  // 4. Manhattan self-curve
  {
    ExperimentConfig c;
    c.tmax = 12;
    c.self = true;
    c.tgrid = {-0.5, 0.0, 0.5};
    runs.push_back(run("manhattan", c, kThreads));
    const auto& r = runs.back();
    std::string why;
    const bool ok = checks_pass(r.report, {"theta("}, why) && checks_pass(r.report, {"bracket width <= 0.05"}, why);
    double w = 0;
    if (r.report.exit_code != 1)
      for (const auto& s : r.report.json["results"]["samples"])
        w = std::max(w, s["theta_upper"].get<double>() - s["theta_lower"].get<double>());
    line(4, ok, "normalized self-curve |theta(t) - (1 - t)| <= bracket width <= 0.05 at t = -0.5, 0, 0.5",
         why.empty() ? "max width " + fmt(w) : why);
  }

  // 5. mean distortion, two routes
  double slope = 0, slope_lo = 0, slope_hi = 0;
  {
    ExperimentConfig c;
    c.tmax = 12;
    c.T = 10;
    c.h = 0.05;
    runs.push_back(run("distortion", c, kThreads));
    const auto& r = runs.back();
    std::string why;
    const bool ok = checks_pass(r.report, {}, why);
    std::string detail = why;
    if (r.report.exit_code != 1) {
      const auto& res = r.report.json["results"];
      slope = res["slope"]["value"].get<double>();
      slope_lo = res["slope"]["lower"].get<double>();
      slope_hi = res["slope"]["upper"].get<double>();
      if (why.empty())
        detail = "avg " + fmt(res["average"]["value"].get<double>()) + ", slope " + fmt(slope) + " [" + fmt(slope_lo) +
                 ", " + fmt(slope_hi) + "], normalized tau " + fmt(res["tau_normalized"]["value"].get<double>());
    }
    line(5, ok, "avg(T=10) and slope(h=0.05) agree within brackets + 0.05; normalized tau >= 0.98", detail);
  }

  // 6. currents identity
  {
    ExperimentConfig c;
    c.Tgrid = {2, 3, 4, 5, 6, 7, 8, 9, 10};
    runs.push_back(run("lambda", c, kThreads));
    const auto& r = runs.back();
    std::string why;
    bool ok = checks_pass(r.report, {}, why);
    std::string detail = why;
    if (r.report.exit_code != 1) {
      const auto& last = r.report.json["results"]["rows"].back();
      const double v = last["value"].get<double>(), conv = last["convergence"].get<double>();
      // the finite-T value carries the last step of the T grid as its bracket
      const bool final_ok = v + conv >= slope_lo && v - conv <= slope_hi;
      if (!final_ok) why += "final entry " + fmt(v) + " +- " + fmt(conv) + " misses slope bracket";
      ok = ok && final_ok;
      detail = why.empty() ? "final " + fmt(v) + " +- " + fmt(conv) + " vs slope [" + fmt(slope_lo) + ", " +
                                 fmt(slope_hi) + "]"
                           : why;
    }
    line(6, ok, "l_psi(Lambda_T) = 1 and currents path = class average exactly for T = 2..10; final entry meets slope",
         detail);
  }

  // 8 (run before 7, which reads its semigroup checks)
  {
    ExperimentConfig c;
    c.delta = 4.25;
    c.alpha = 0;
    c.l = {5, 6};
    c.radius = 8;
    runs.push_back(run("green_density", c, kThreads));
  }
  const Run& density = runs.back();

  // 7. inequality certificates
  {
    std::string why;
    bool ok = checks_pass(green_report, {"uniform-measure bound"}, why);
    ok = checks_pass(density.report, {"|g|_S_l", "at l=6.0"}, why) && ok;
    line(7, ok, "uniform-measure bound on ball 5 (SRW); semigroup bounds on ball 8 at l = 6 with M = 42",
         why.empty() ? "safe sides: upper d_mu, lower G(o,o)" : why);
  }

  {
    std::string why;
    bool ok = checks_pass(density.report, {"Dil"}, why);
    ok = checks_pass(density.report, {"nonincreasing"}, why) && ok;
    ok = within(density.seconds, 600, why) && ok;
    std::string detail = why;
    if (why.empty()) {
      for (const auto& row : density.report.json["results"]["rows"])
        detail += "l=" + fmt(row["l"].get<double>()) + " product " + fmt(row["product"].get<double>()) + " dil " +
                  fmt(row["dil_mu_d"].get<double>()) + " <= " + fmt(row["bound"].get<double>()) + "; ";
      detail += fmt(density.seconds) + " s";
    }
    line(8, ok, "Green-density: Dil products >= 1, Dil(d_mu, d) <= log #S_l / l, product nonincreasing", detail);
  }

  // 9. fundamental inequality
  {
    ExperimentConfig c;
    c.l = {5, 6};
    c.delta = 4.25;
    runs.push_back(run("fundamental", c, kThreads));
    const auto& r = runs.back();
    std::string why;
    const bool ok = checks_pass(r.report, {}, why);
    std::string detail = why;
    if (why.empty()) {
      const auto& res = r.report.json["results"];
      detail = "SRW " + fmt(res["srw"]["h_over_l"].get<double>());
      for (const auto& row : res["thickened"])
        detail += ", l=" + fmt(row["l"].get<double>()) + " " + fmt(row["h_over_l"].get<double>());
    }
    line(9, ok, "SRW h/l within 0.02 of log 3; thickened-sphere h/l <= v_d + 0.02 and nondecreasing", detail);
  }

  // 10. determinism across thread counts
  {
    bool ok = true;
    std::string why;
    for (const auto& r : runs) {
      const Run again = run(r.name, r.config, 1);
      if (again.report.json.dump() != r.report.json.dump()) {
        ok = false;
        why += (why.empty() ? "" : ", ") + r.name;
      }
    }
    line(10, ok, "reports byte-identical at 1 and 4 threads", why.empty() ? "" : "differs: " + why);
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
