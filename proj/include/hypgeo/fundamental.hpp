#pragma once

// h/l for a random walk: the ratio of asymptotic entropy to drift, estimated
// as 1/tau(d/d_mu) by class averaging over the Green metric, next to the
// Monte-Carlo drift and the entropy upper bounds H(mu^{*k})/k.

#include <cmath>
#include <limits>
#include <vector>

#include "hypgeo/green.hpp"
#include "hypgeo/growth.hpp"
#include "hypgeo/measure.hpp"

namespace hypgeo {

struct FundamentalOptions {
  int maxlen = 4;          // classes enumerated for the Green spectrum
  double T = std::numeric_limits<double>::infinity();  // lowered to the covered range
  int green_radius = 1;    // ball cached by the Green potential
  GreenOptions green;
  int walk_steps = 200;    // drift: steps per trial; 0 skips the drift
  int trials = 200;
  std::uint64_t seed = 1;
  int entropy_kmax = 2;    // 0 skips the entropy bounds
  ConvolveOptions convolve;
};

struct FundamentalEstimate {
  double h_over_l = 0.0;  // 1 / tau(d / d_mu)
  double lower = 0.0;
  double upper = 0.0;
  DistortionAverage tau;
  DriftEstimate drift;
  std::vector<double> entropy_upper;
  double entropy_drift_upper = std::numeric_limits<double>::quiet_NaN();  // min_k H(mu^k)/k / drift
  bool heuristic = true;
};

inline FundamentalEstimate entropy_over_drift(const FiniteMeasure& mu, const PotentialPtr& d,
                                              const FundamentalOptions& opt = {}) {
  require_symmetric(mu);
  require(d->rank() == mu.rank(), "rank mismatch between measure and metric");
  FundamentalEstimate f;
  const auto dmu = green_potential(mu, opt.green_radius, opt.green, "d_mu");
  f.tau = mean_distortion_avg(*d, *dmu, opt.T, opt.maxlen);
  f.h_over_l = 1.0 / f.tau.value;
  f.lower = 1.0 / f.tau.upper;
  f.upper = f.tau.lower > 0 ? 1.0 / f.tau.lower : std::numeric_limits<double>::infinity();
  if (opt.walk_steps > 0 && opt.trials > 0) f.drift = drift(mu, *d, opt.walk_steps, opt.trials, opt.seed);
  if (opt.entropy_kmax > 0) {
    f.entropy_upper = entropy_upper(mu, opt.entropy_kmax, opt.convolve);
    if (f.drift.mean > 0) f.entropy_drift_upper = f.entropy_upper.back() / f.drift.mean;
  }
  return f;
}

}  // namespace hypgeo
