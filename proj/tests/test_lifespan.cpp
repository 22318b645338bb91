#include <cmath>
#include <random>

#include "doctest.h"
#include "hartree/lifespan.hpp"

using namespace hartree;

namespace {

std::vector<std::pair<double, double>> power_law(double c, double slope,
                                                 std::initializer_list<double> eps) {
  std::vector<std::pair<double, double>> out;
  for (double e : eps) out.emplace_back(e, c * std::pow(e, slope));
  return out;
}

}  // namespace

TEST_CASE("exact power law") {
  const auto fit = fit_slope(power_law(1.0, -5.0, {1.0, 1.3, 1.7, 2.2, 2.9}), -0.4);
  CHECK(fit.slope == doctest::Approx(-5.0).epsilon(1e-12));
  CHECK(fit.slope_stderr < 1e-12);
  CHECK(fit.theoretical == doctest::Approx(-5.0).epsilon(1e-15));
  CHECK(fit.theoretical_delta == doctest::Approx(-5.1).epsilon(1e-15));
  CHECK(fit.passed);
  CHECK(fit.lower_bound_shape_ok);
  CHECK(fit.epsilons.front() == 1.0);
}

TEST_CASE("noisy power law") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto pairs = power_law(3.0, -5.0, {1.0, 1.3, 1.7, 2.2, 2.9});
  for (auto& [e, T] : pairs) T *= 1.0 + 0.01 * U(rng);
  const auto fit = fit_slope(pairs, -0.4);
  CHECK(std::abs(fit.slope + 5.0) < 0.1);
  CHECK(fit.slope_stderr > 0.0);
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("pass window and lower bound shape") {
  CHECK(fit_slope(power_law(1.0, -6.2, {1, 2, 3, 4}), -0.4).passed);
  CHECK_FALSE(fit_slope(power_law(1.0, -6.3, {1, 2, 3, 4}), -0.4).passed);
  CHECK(fit_slope(power_law(1.0, -3.8, {1, 2, 3, 4}), -0.4).passed);
  CHECK_FALSE(fit_slope(power_law(1.0, -3.7, {1, 2, 3, 4}), -0.4).passed);
  // steeper than eps^(2/gamma) drops below the bound anchored at the smallest eps
  CHECK_FALSE(fit_slope(power_law(1.0, -6.0, {1, 2, 3, 4}), -0.4).lower_bound_shape_ok);
  CHECK(fit_slope(power_law(1.0, -4.0, {1, 2, 3, 4}), -0.4).lower_bound_shape_ok);
}

TEST_CASE("fit input errors") {
  CHECK_THROWS_AS(fit_slope(power_law(1.0, -5.0, {1, 2, 3}), -0.4), DomainError);
  CHECK_THROWS_AS(fit_slope({{1, 1}, {1, 2}, {1, 3}, {1, 4}}, -0.4), DomainError);
  CHECK_THROWS_AS(fit_slope({{1, 1}, {2, 0}, {3, 3}, {4, 4}}, -0.4), DomainError);
}

TEST_CASE("censoring") {
  Params p;
  p.gamma = -0.4;
  LifespanOptions opt;
  opt.h = 1.0 / 4;
  opt.t_cap = 20.0;
  CHECK(lifespan_measure(p, DataFamily::bump_v1_only, 0.0, opt).censored);
  // small data do not blow up before the cap
  CHECK(lifespan_measure(p, DataFamily::bump_v1_only, 0.5, opt).censored);
  p.gamma = 1.0;
  CHECK_THROWS_AS(lifespan_measure(p, DataFamily::bump_v1_only, 1.0, opt), DomainError);
}

TEST_CASE("large data blow up and refine at second order") {
  Params p;
  p.gamma = -0.4;
  LifespanOptions opt;
  opt.h = 1.0 / 8;
  opt.levels = 3;
  opt.t_cap = 200.0;
  const auto m = lifespan_measure(p, DataFamily::bump_v1_only, 4.0, opt);
  REQUIRE_FALSE(m.censored);
  REQUIRE(m.t_levels.size() == 3);
  CHECK(m.threshold_ok);
  CHECK(m.refinement_ok);
  const double d1 = m.t_levels[1] - m.t_levels[0], d2 = m.t_levels[2] - m.t_levels[1];
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.25));
  CHECK(m.t_richardson == doctest::Approx(m.t_levels[2] + d2 / 3).epsilon(1e-15));

  const auto sweep = lifespan_sweep(p, DataFamily::bump_v1_only, {5.0, 4.0}, [&] {
    LifespanOptions o = opt;
    o.levels = 2;
    return o;
  }());
  CHECK(sweep.monotone);
  CHECK(sweep.censored == 0);
  CHECK(sweep.points.front().epsilon == 4.0);
}
