// hypgeo: runs one experiment recipe and prints its report.
// Exit codes: 0 all checks pass, 2 a check failed, 1 error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hypgeo/experiments.hpp"

using namespace hypgeo;

namespace {

struct Flags {
  std::string config;
  int rank = 2;
  std::string gens, measure, cache_dir, out = "json";
  int radius = 0, kmax = 16, trials = 200, threads = 1, maxlen = 0, walk_steps = 100, extra = 7, entropy_kmax = 2;
  double tmax = 12, delta = 4.25, alpha = 0, T = 10, h = 0.05, eps_tail = 1e-6;
  std::vector<double> l, tgrid, Tgrid, eps;
  std::uint64_t seed = 1;
  bool timing = false, self = false;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file; flags given on the command line override it");
  sub->add_option("--rank", f.rank, "free group rank")->default_val(2);
  sub->add_option("--gens", f.gens, "generating set file for the compared word metric (default: S plus ab, BA)");
  sub->add_option("--measure", f.measure, "measure file, one 'word weight' per line (default: simple random walk)");
  sub->add_option("--radius", f.radius,
                  "ball radius (ball 2, classes 4, hyperbolicity 4, green 5, green_density 8, moduli 8)");
  sub->add_option("--tmax", f.tmax, "growth threshold (default 12)");
  sub->add_option("--l", f.l, "comma-separated thickened-sphere radii (default 5,6)")->delimiter(',');
  sub->add_option("--delta", f.delta, "thickened-sphere width (default 4.25)");
  sub->add_option("--alpha", f.alpha, "additive constant of the reference metric (default 0)");
  sub->add_option("--kmax", f.kmax, "stable-length iteration cap (default 16)");
  sub->add_option("--maxlen", f.maxlen, "longest class enumerated (default: per experiment)");
  sub->add_option("--T", f.T, "class-averaging threshold (default 10)");
  sub->add_option("--step", f.h, "finite-difference step of the distortion slope (default 0.05)");
  sub->add_option("--tgrid", f.tgrid, "comma-separated Manhattan curve parameters (default -0.5,0,0.5)")
      ->delimiter(',');
  sub->add_option("--Tgrid", f.Tgrid, "comma-separated thresholds for lambda (default 2..10)")->delimiter(',');
  sub->add_option("--eps", f.eps, "comma-separated strong-hyperbolicity parameters (default 0.5,1,2)")
      ->delimiter(',');
  sub->add_option("--extra", f.extra, "Green killing radius beyond the ball (default 7)");
  sub->add_option("--eps-tail", f.eps_tail, "Green series tail tolerance (default 1e-6)");
  sub->add_option("--entropy-kmax", f.entropy_kmax, "convolution powers for entropy bounds (default 2)");
  sub->add_option("--seed", f.seed, "random seed (default 1)");
  sub->add_option("--trials", f.trials, "Monte-Carlo trials (default 200)");
  sub->add_option("--walk-steps", f.walk_steps, "steps per drift trial (default 100)");
  sub->add_option("--cache-dir", f.cache_dir, "cache directory for balls and Green tables (default: none)");
  sub->add_option("--out", f.out, "output format")->check(CLI::IsMember({"json", "csv"}))->default_val("json");
  sub->add_option("--threads", f.threads, "worker threads (default 1)")->check(CLI::PositiveNumber);
  sub->add_flag("--timing", f.timing, "add wall time to the report (breaks byte-identity)");
  sub->add_flag("--self", f.self, "use the standard metric against itself");
}

ExperimentConfig build_config(CLI::App* sub, const Flags& f) {
  ExperimentConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw InvalidArgument("cannot open config file " + f.config);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const std::exception& e) {
      throw InvalidArgument(std::string("bad config JSON: ") + e.what());
    }
    apply_json(c, j);
  }
  auto given = [&](const char* name) { return sub->count(name) > 0; };
  if (given("--rank")) c.rank = f.rank;
  if (given("--gens")) c.gens = f.gens;
  if (given("--measure")) c.measure = f.measure;
  if (given("--radius")) c.radius = f.radius;
  if (given("--tmax")) c.tmax = f.tmax;
  if (given("--l")) c.l = f.l;
  if (given("--delta")) c.delta = f.delta;
  if (given("--alpha")) c.alpha = f.alpha;
  if (given("--kmax")) c.kmax = f.kmax;
  if (given("--maxlen")) c.maxlen = f.maxlen;
  if (given("--T")) c.T = f.T;
  if (given("--step")) c.h = f.h;
  if (given("--tgrid")) c.tgrid = f.tgrid;
  if (given("--Tgrid")) c.Tgrid = f.Tgrid;
  if (given("--eps")) c.eps = f.eps;
  if (given("--extra")) c.extra = f.extra;
  if (given("--eps-tail")) c.eps_tail = f.eps_tail;
  if (given("--entropy-kmax")) c.entropy_kmax = f.entropy_kmax;
  if (given("--seed")) c.seed = f.seed;
  if (given("--trials")) c.trials = f.trials;
  if (given("--walk-steps")) c.walk_steps = f.walk_steps;
  if (given("--cache-dir")) c.cache_dir = f.cache_dir;
  if (given("--out")) c.out = f.out;
  if (given("--threads")) c.threads = f.threads;
  if (given("--timing")) c.timing = f.timing;
  if (given("--self")) c.self = f.self;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on metric structures of free groups"};
  app.require_subcommand(1);
  Flags flags;
  const std::map<std::string, std::string> help{
      {"ball", "sphere sizes of a ball"},
      {"classes", "conjugacy classes up to a length"},
      {"growth", "exponential growth rate of a metric"},
      {"hyperbolicity", "four-point and strong hyperbolicity defects"},
      {"green", "Green function and Green metric of a symmetric measure"},
      {"green_density", "Green metrics of thickened-sphere walks against the standard metric"},
      {"distortion", "mean distortion by class averaging and by the Manhattan slope"},
      {"manhattan", "Manhattan curve samples"},
      {"moduli", "dilations, length distance and comparability constant"},
      {"lambda", "normalized currents and their lengths"},
      {"fundamental", "entropy over drift for the simple and thickened-sphere walks"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, text] : help) {
    auto* s = app.add_subcommand(name, text);
    add_flags(s, flags);
    subs.push_back(s);
  }
  CLI11_PARSE(app, argc, argv);
  for (auto* s : subs) {
    if (!s->parsed()) continue;
    ExperimentConfig c;
    try {
      c = build_config(s, flags);
    } catch (const std::exception& e) {
      Json err{{"experiment", s->get_name()}, {"status", "error"},
               {"error", Json{{"type", "InvalidArgument"}, {"message", e.what()}}}};
      std::cout << err.dump(2) << '\n';
      return 1;
    }
    const Report r = run_experiment(s->get_name(), c);
    std::cout << render(r, c.out);
    if (r.exit_code == 1) std::cerr << "error: " << r.json["error"]["message"].get<std::string>() << '\n';
    return r.exit_code;
  }
  return 1;
}
