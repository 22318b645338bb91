#pragma once

// Numerical lifespans of blowing-up runs and the fit of T(eps) ~ eps^slope.

#include <cstddef>
#include <utility>
#include <vector>

#include "hartree/solver.hpp"

namespace hartree {

struct LifespanOptions {
  /// Coarsest spacing; each further level halves it.
  double h = 1.0 / 8;
  std::size_t levels = 2;
  /// Runs without blow-up before t_cap are censored.
  double t_cap = 1e5;
  /// The lower threshold crossing must lie within this many h of t_numeric.
  double threshold_window = 2.0;
};

struct LifespanMeasurement {
  double epsilon = 0.0;
  bool censored = false;
  /// Blow-up time on each level, coarse to fine.
  std::vector<double> t_levels;
  std::vector<double> h_levels;
  /// Gap between the two threshold crossings on the finest level.
  double threshold_gap = 0.0;
  bool threshold_ok = false;
  /// t(h/2) + (t(h/2) - t(h)) / 3 from the two finest levels.
  double t_richardson = 0.0;
  /// Each refinement moved t less than the previous one (needs three levels).
  bool refinement_ok = false;
};

/// Blow-up time for data eps * bump; params supply gamma, R and thresholds.
LifespanMeasurement lifespan_measure(const Params& base, DataFamily family, double epsilon,
                                     const LifespanOptions& opt);

struct LifespanFit {
  double gamma = 0.0;
  std::vector<double> epsilons;
  std::vector<double> t_numerics;
  double slope = 0.0;
  double slope_stderr = 0.0;
  double theoretical = 0.0;        // 2 / gamma
  double theoretical_delta = 0.0;  // 2 / gamma - delta
  double intercept = 0.0;
  bool passed = false;
  /// T(eps) >= A eps^(2/gamma) with A fixed by the smallest eps.
  bool lower_bound_shape_ok = false;
};

/// Least squares of log T against log eps; needs at least four pairs.
LifespanFit fit_slope(const std::vector<std::pair<double, double>>& pairs, double gamma,
                      double delta = 0.1);

struct SweepResult {
  std::vector<LifespanMeasurement> points;
  /// Uncensored blow-up times strictly decrease with eps.
  bool monotone = false;
  std::size_t censored = 0;
};

SweepResult lifespan_sweep(const Params& base, DataFamily family, std::vector<double> epsilons,
                           const LifespanOptions& opt);

}  // namespace hartree
