#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hartree/blowup.hpp"
#include "hartree/potential.hpp"

using namespace hartree;

namespace {

constexpr double kPi = std::numbers::pi;

RadialProfile indicator(double h, double R) {
  return RadialProfile::sample(h, static_cast<std::size_t>(std::lround(R / h)) + 1, R,
                               [](double) { return 1.0; });
}

RadialProfile positive_profile(std::mt19937_64& rng, double h, double support) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double a = 0.5 + U(rng), b = 1.0 + 4.0 * U(rng), c = U(rng);
  const auto n = static_cast<std::size_t>(std::lround(support / h)) + 1;
  return RadialProfile::sample(h, n, support, [&](double r) {
    const double x = r / support;
    return a * (1.0 - x * x) * (1.0 + c * std::sin(b * r) * std::sin(b * r));
  });
}

}  // namespace

TEST_CASE("mass of simple profiles") {
  CHECK(mass(RadialProfile::zeros(0.1, 11)) == 0.0);
  CHECK(mass(indicator(1.0 / 16, 1.0)) == doctest::Approx(4 * kPi / 3).epsilon(1e-14));
  // piecewise linear data are integrated exactly
  const auto lin = RadialProfile::sample(1.0 / 8, 9, 1.0, [](double r) { return 1.0 - r; });
  CHECK(mass(lin) == doctest::Approx(kPi / 3).epsilon(1e-14));
  CHECK(mass_sq(indicator(1.0 / 16, 2.0)) == doctest::Approx(4 * kPi * 8 / 3).epsilon(1e-14));
}

TEST_CASE("separable case gamma = 0") {
  const auto u = indicator(1.0 / 16, 1.0);
  const double v = 4 * kPi / 3;
  CHECK(mass_rhs(u, 0.0, 0.0) == doctest::Approx(v * v).epsilon(1e-12));
  CHECK(mass_rhs(u, 0.0, 1.0) == doctest::Approx(v * v / 4).epsilon(1e-12));
  CHECK(mass_rhs(RadialProfile::zeros(0.1, 11), 0.5, 2.0) == 0.0);

  // F'' (1+t)^2 = F \int u^2 in the continuum; the convolver interpolates
  // r u^2 while the masses interpolate u, so the two sides meet at O(h^2)
  for (int k = 0; k < 6; ++k) {
    const double t = 0.5 * k;
    double gap[2];
    for (int m = 0; m < 2; ++m) {
      std::mt19937_64 rng(100 + k);
      const double h = 1.0 / (32 << m);
      const auto p = positive_profile(rng, h, 1.0 + t);
      const auto [lhs, rhs] = frame_check(mass_rhs(p, 0.0, t), mass(p), mass_sq(p), 0.0, t);
      gap[m] = std::abs(lhs - rhs) / rhs;
      CHECK(gap[m] < 2 * h * h);
    }
    CHECK(gap[0] / gap[1] == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("kernel bound direction for negative gamma") {
  // for gamma < 0, |x - y|^-gamma <= (2(1+t))^-gamma on the support, so the
  // comparison quantity bounds F'' from above
  std::mt19937_64 rng(12);
  for (int k = 0; k < 20; ++k) {
    const double t = 0.5 * k;
    const auto p = positive_profile(rng, 1.0 / 16, 1.0 + t);
    const auto [lhs, rhs] = frame_check(mass_rhs(p, -0.4, t), mass(p), mass_sq(p), -0.4, t);
    CHECK(lhs <= rhs * (1 + 1e-12));
    CHECK(lhs > 0.3 * rhs);
  }
  // and from below for gamma > 0
  for (int k = 0; k < 20; ++k) {
    const double t = 0.5 * k;
    const auto p = positive_profile(rng, 1.0 / 16, 1.0 + t);
    const auto [lhs, rhs] = frame_check(mass_rhs(p, 1.0, t), mass(p), mass_sq(p), 1.0, t);
    CHECK(lhs >= rhs * (1 - 1e-12));
  }
}

TEST_CASE("cubic lower bound from Cauchy-Schwarz") {
  // F^2 <= |B_{1+t}| \int u^2 turns the F \int u^2 comparison into the cubic one
  std::mt19937_64 rng(13);
  for (double gamma : {-0.4, 1.0}) {
    for (int k = 0; k < 20; ++k) {
      const double t = 0.5 * k;
      const auto p = positive_profile(rng, 1.0 / 16, 1.0 + t);
      const double rhs = mass_rhs(p, gamma, t);
      const double linear = frame_check(rhs, mass(p), mass_sq(p), gamma, t).second;
      const double cubic = frame2_check(rhs, mass(p), gamma, t).second;
      CHECK(linear >= cubic * (1 - 1e-12));
      if (gamma > 0.0) CHECK(rhs >= cubic);
    }
  }
}

TEST_CASE("envelope parameters") {
  CHECK(t_gamma(-0.4) == doctest::Approx(1.25).epsilon(1e-15));
  const double t[] = {1.25, 1.5};
  const auto e = ode_envelope(1.0, 1.0, -0.4, 1.0, 1.0, t);
  CHECK(e.t0 == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(e.t1 == doctest::Approx(std::pow(2 * std::pow(1.25, 0.2), 5.0)).epsilon(1e-14));
  CHECK(e.t2 == e.t1);
  CHECK(e.C2 == doctest::Approx(std::pow(2.0, -2.1) / 0.4).epsilon(1e-14));
  CHECK_THROWS_AS(ode_envelope(1.0, 1.0, 0.0, 1.0, 1.0, t), DomainError);
  CHECK_THROWS_AS(ode_envelope(1.0, 1.0, 0.5, 1.0, 1.0, t), DomainError);
  const double early[] = {1.0, 1.5};
  CHECK_THROWS_AS(ode_envelope(1.0, 1.0, -0.4, 1.0, 1.0, early), DomainError);
}

TEST_CASE("envelope integration") {
  std::vector<double> grid;
  for (int n = 0; n <= 400; ++n) grid.push_back(1.25 + 0.05 * n);
  // no forcing: a straight line, reproduced exactly
  const auto line = ode_envelope(0.0, 1.0, -0.4, 2.0, 0.5, grid);
  for (std::size_t n = 0; n < grid.size(); ++n)
    CHECK(line.numeric[n] == doctest::Approx(2.0 + 0.5 * (grid[n] - 1.25)).epsilon(1e-13));
  // fourth-order convergence of the comparison solution
  double end[3];
  for (int k = 0; k < 3; ++k) {
    std::vector<double> g;
    const int m = 50 << k;
    for (int n = 0; n <= m; ++n) g.push_back(1.25 + 20.0 * n / m);
    end[k] = ode_envelope(2.0, 1.0, -0.4, 1.0, 1.0, g).numeric.back();
  }
  CHECK(std::log2((end[0] - end[1]) / (end[1] - end[2])) == doctest::Approx(4.0).epsilon(0.1));
  // a positive forcing keeps the solution above the straight line
  const auto forced = ode_envelope(2.0, 1.0, -0.4, 2.0, 0.5, grid);
  for (std::size_t n = 1; n < grid.size(); ++n) CHECK(forced.numeric[n] > line.numeric[n]);
}

TEST_CASE("kato parameters") {
  CHECK(kato_min_j(-0.4) == 7);
  CHECK(kato_min_j(-0.3) == 10);
  const auto k = kato_bound(-0.4, 7, 1.0, 1.0, 1.25);
  CHECK(k.M == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(k.eps_exponent == doctest::Approx(-80.0).epsilon(1e-12));
  CHECK(k.q == doctest::Approx(4.6).epsilon(1e-15));
  CHECK(k.a == doctest::Approx(1.4).epsilon(1e-15));
  CHECK_FALSE(k.exponent_ok);
  CHECK_THROWS_AS(kato_bound(-0.4, 6, 1.0, 1.0, 1.25), DomainError);
  CHECK_THROWS_AS(kato_bound(0.2, 7, 1.0, 1.0, 1.25), DomainError);

  for (int j : {7, 9, 20, 100}) {
    const auto a = kato_bound(-0.4, j, 0.5, 0.6, 1.25);
    const auto b = kato_bound(-0.4, j, 0.25, 0.6, 1.25);
    CHECK(a.p == b.p);
    CHECK(a.q == b.q);
    CHECK(a.B_coef == b.B_coef);
    CHECK(a.B_coef == doctest::Approx(std::pow(2.0, -1.6) * 3 / kPi).epsilon(1e-15));
    // T0 scales with the reported power of epsilon
    CHECK(std::log(b.T0 / a.T0) / std::log(0.5) == doctest::Approx(a.eps_exponent).epsilon(1e-9));
    CHECK(a.eps_exponent < 2.0 / -0.4);
  }
}

TEST_CASE("kato threshold index against a scan") {
  for (double gamma : {-0.4, -0.25, -0.1}) {
    for (double delta : {0.5, 0.1, 0.02}) {
      int scan = kato_min_j(gamma);
      while (!kato_bound(gamma, scan, 1.0, 1.0, 1.0, delta).exponent_ok) ++scan;
      CAPTURE(gamma);
      CAPTURE(delta);
      CHECK(kato_j1(gamma, delta) == scan);
    }
  }
}

TEST_CASE("taylor term bound") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double x = 200.0 * U(rng) * U(rng);
    const int j = static_cast<int>(60 * U(rng));
    CHECK(taylor_bound_holds(x, j));
  }
  CHECK(taylor_bound_holds(0.0, 0));
  CHECK_THROWS(taylor_bound_holds(-1.0, 2));
}

TEST_CASE("mass series of a short blow-up run") {
  Params p;
  p.gamma = -0.4;
  p.epsilon = 2.0;
  p.R = 1.0;
  p.h = 1.0 / 64;
  p.t_max = 3.0;
  const DataSpec spec{DataFamily::bump_v1_only, p.epsilon, 1.0};
  const auto d = make_data(spec, p.h, p.grid().n_r());
  MassSeries live;
  const auto s = solve_march(p, d, mass_observer(live, p.gamma, p.h, p.R));
  live.finish(p.h);
  const auto m = mass_series(s);
  REQUIRE(m.F.size() == live.F.size());
  for (std::size_t k = 0; k < m.F.size(); ++k) {
    CHECK(m.F[k] == doctest::Approx(live.F[k]).epsilon(1e-13));
    CHECK(m.rhs[k] == doctest::Approx(live.rhs[k]).epsilon(1e-13));
  }
  CHECK(m.F[0] == 0.0);
  for (std::size_t k = 1; k + 1 < m.F.size(); ++k) CHECK(m.dF[k] > 0.0);
  // F' starts at eps C0
  CHECK(m.dF[1] == doctest::Approx(data_mass(spec)).epsilon(1e-2));

  IdentityOptions opt;
  opt.rel_tol = 5e-3;
  opt.t_from = t_gamma(p.gamma);
  const auto rep = identity_report(m, opt);
  CHECK(rep.samples > 100);
  CHECK(rep.violations == 0);
  CHECK(frame2_report(m, p.gamma).violations == 0);
}
