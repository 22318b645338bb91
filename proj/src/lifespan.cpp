#include "hartree/lifespan.hpp"

#include <algorithm>
#include <cmath>

namespace hartree {

LifespanMeasurement lifespan_measure(const Params& base, DataFamily family, double epsilon,
                                     const LifespanOptions& opt) {
  if (!(base.gamma < 0.0)) throw DomainError("lifespan_measure needs gamma < 0");
  if (opt.levels < 1) throw DomainError("lifespan_measure needs at least one level");
  LifespanMeasurement out;
  out.epsilon = epsilon;
  if (epsilon == 0.0) {
    out.censored = true;
    return out;
  }
  const DataSpec spec{family, epsilon, base.R};
  for (std::size_t k = 0; k < opt.levels; ++k) {
    Params p = base;
    p.epsilon = epsilon;
    p.h = opt.h / static_cast<double>(1u << k);
    p.t_max = opt.t_cap;
    p.keep_history = false;
    const auto s = solve_march(p, make_data(spec, p.h, p.grid().n_r()));
    if (!s.blew_up || !s.t_numeric) {
      out.censored = true;
      return out;
    }
    out.t_levels.push_back(*s.t_numeric);
    out.h_levels.push_back(p.h);
    double lowest = *s.t_numeric;
    for (const auto& [level, tc] : s.crossings) lowest = std::min(lowest, tc);
    out.threshold_gap = *s.t_numeric - lowest;
    out.threshold_ok = out.threshold_gap <= opt.threshold_window * p.h;
  }
  const std::size_t n = out.t_levels.size();
  out.t_richardson = n >= 2 ? out.t_levels[n - 1] + (out.t_levels[n - 1] - out.t_levels[n - 2]) / 3.0
                            : out.t_levels.back();
  out.refinement_ok = n >= 3;
  for (std::size_t k = 2; k < n; ++k) {
    if (std::abs(out.t_levels[k] - out.t_levels[k - 1]) >=
        std::abs(out.t_levels[k - 1] - out.t_levels[k - 2])) {
      out.refinement_ok = false;
    }
  }
  return out;
}

LifespanFit fit_slope(const std::vector<std::pair<double, double>>& pairs, double gamma,
                      double delta) {
  if (pairs.size() < 4) throw DomainError("fit_slope needs at least four uncensored points");
  LifespanFit fit;
  fit.gamma = gamma;
  fit.theoretical = 2.0 / gamma;
  fit.theoretical_delta = 2.0 / gamma - delta;
  auto sorted = pairs;
  std::sort(sorted.begin(), sorted.end());
  double mx = 0.0, my = 0.0;
  for (const auto& [e, T] : sorted) {
    if (!(e > 0.0) || !(T > 0.0)) throw DomainError("fit_slope needs positive pairs");
    fit.epsilons.push_back(e);
    fit.t_numerics.push_back(T);
    mx += std::log(e);
    my += std::log(T);
  }
  const double n = static_cast<double>(sorted.size());
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [e, T] : sorted) {
    sxx += (std::log(e) - mx) * (std::log(e) - mx);
    sxy += (std::log(e) - mx) * (std::log(T) - my);
  }
  if (sxx == 0.0) throw DomainError("fit_slope needs distinct epsilons");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (const auto& [e, T] : sorted) {
    const double res = std::log(T) - fit.intercept - fit.slope * std::log(e);
    ssr += res * res;
  }
  fit.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
  fit.passed = std::abs(fit.slope - fit.theoretical) <= 0.25 * std::abs(fit.theoretical);

  const double A = fit.t_numerics.front() / std::pow(fit.epsilons.front(), fit.theoretical);
  fit.lower_bound_shape_ok = true;
  for (std::size_t k = 0; k < fit.epsilons.size(); ++k) {
    const double lower = A * std::pow(fit.epsilons[k], fit.theoretical);
    if (fit.t_numerics[k] < lower * (1.0 - 1e-12)) fit.lower_bound_shape_ok = false;
  }
  return fit;
}

SweepResult lifespan_sweep(const Params& base, DataFamily family, std::vector<double> epsilons,
                           const LifespanOptions& opt) {
  std::sort(epsilons.begin(), epsilons.end());
  SweepResult out;
  for (double e : epsilons) {
    out.points.push_back(lifespan_measure(base, family, e, opt));
    if (out.points.back().censored) ++out.censored;
  }
  out.monotone = true;
  double prev = INFINITY;
  for (const auto& m : out.points) {
    if (m.censored) continue;
    if (!(m.t_richardson < prev)) out.monotone = false;
    prev = m.t_richardson;
  }
  return out;
}

}  // namespace hartree
