#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "hartree/radial_core.hpp"

using namespace hartree;

namespace {

RadialProfile constant(double h, std::size_t n, double c) {
  return RadialProfile::sample(h, n, (n - 1) * h, [c](double) { return c; });
}

RadialProfile linear(double h, std::size_t n, double c0, double c1) {
  return RadialProfile::sample(h, n, (n - 1) * h, [=](double r) { return c0 + c1 * r; });
}

double closed_form(double c0, double c1, double e, double a, double b) {
  const auto F = [&](double x) {
    return c0 * std::pow(x, e + 1) / (e + 1) + c1 * std::pow(x, e + 2) / (e + 2);
  };
  return F(b) - F(a);
}

}  // namespace

TEST_CASE("grid invariants") {
  const Grid g(0.25, 9, 5);
  CHECK(g.r_max() == 2.0);
  CHECK(g.t_max() == 1.0);
  CHECK(g.r(3) == 0.75);
  CHECK(g.t(2) == g.r(2));
  const Grid c = Grid::covering(1.0 / 64, 1.0, 3.0);
  CHECK(c.n_r() == 65);
  CHECK(c.n_t() == 193);
  CHECK_THROWS_AS(Grid(0.0, 4, 4), DomainError);
  CHECK_THROWS_AS(Grid(1.0, 1, 4), DomainError);
  CHECK_THROWS_AS(Grid(1.0, 4, 0), DomainError);
}

TEST_CASE("profile support") {
  const auto p = RadialProfile::sample(0.1, 21, 1.0, [](double) { return 2.0; });
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i * 0.1 > 1.0 + 1e-9) CHECK(p[i] == 0.0);
  }
  CHECK(p.support_node() == 10);
  CHECK_THROWS_AS(RadialProfile(0.1, std::vector<double>(5, 0.0), 1.0), DomainError);
}

TEST_CASE("trapezoid_weighted examples") {
  CHECK(trapezoid_weighted(constant(0.25, 17, 1.0), 1.0, 1.0, 3.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(trapezoid_weighted(constant(0.25, 17, 0.0), 2.7, 0.3, 3.1) == 0.0);
  CHECK(trapezoid_weighted(linear(0.5, 5, 0.0, 1.0), 0.0, 0.0, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("trapezoid_weighted domain errors") {
  const auto p = constant(0.25, 9, 1.0);
  CHECK_THROWS_AS(trapezoid_weighted(p, 0.0, 0.0, 2.5), DomainError);
  CHECK_THROWS_AS(trapezoid_weighted(p, 0.0, 1.5, 1.0), DomainError);
  CHECK_THROWS_AS(trapezoid_weighted(p, -1.0, 0.0, 1.0), DomainError);
  CHECK_NOTHROW(trapezoid_weighted(p, -1.0, 0.5, 1.0));
}

TEST_CASE("linear profiles are integrated exactly") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double h = 0.05 + 0.2 * U(rng);
    const std::size_t n = 20;
    const double c0 = 2 * U(rng) - 1;
    const double c1 = 2 * U(rng) - 1;
    const auto p = linear(h, n, c0, c1);
    const double a = U(rng) * p.r_max();
    const double b = a + U(rng) * (p.r_max() - a);
    for (double e : {0.0, 1.0, 2.0, 3.0, 5.0}) {
      const double exact = closed_form(c0, c1, e, a, b);
      const double scale = closed_form(std::abs(c0), std::abs(c1), e, a, b) + 1e-300;
      CHECK(std::abs(trapezoid_weighted(p, e, a, b) - exact) <= 1e-12 * scale + 1e-14);
    }
    for (double e : {-0.5, -0.9, 0.4, 1.3, 2.7}) {
      const double lo = e <= -1 ? a + h : a;
      const double exact = closed_form(c0, c1, e, lo, b);
      const double scale = closed_form(std::abs(c0), std::abs(c1), e, lo, b) + 1e-300;
      CHECK(std::abs(trapezoid_weighted(p, e, lo, b) - exact) <= 1e-12 * scale + 1e-14);
    }
  }
}

TEST_CASE("indicator profile is exact") {
  const auto p = RadialProfile::sample(1.0 / 8, 17, 1.0, [](double) { return 1.0; });
  CHECK(trapezoid_weighted(p, 2.0, 0.0, 2.0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(trapezoid_weighted(p, 0.5, 0.0, 2.0) == doctest::Approx(1.0 / 1.5).epsilon(1e-14));
}

TEST_CASE("additivity and linearity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double h = 0.1;
  const std::size_t n = 41;
  std::vector<double> s1(n), s2(n);
  for (std::size_t i = 0; i < n; ++i) {
    s1[i] = U(rng);
    s2[i] = U(rng);
  }
  const RadialProfile p1(h, s1, 4.0), p2(h, s2, 4.0);
  std::vector<double> mix(n);
  for (std::size_t i = 0; i < n; ++i) mix[i] = 2.0 * s1[i] - 3.0 * s2[i];
  const RadialProfile pm(h, mix, 4.0);
  for (int k = 0; k < 100; ++k) {
    double x[3] = {2 + 2 * U(rng), 2 + 2 * U(rng), 2 + 2 * U(rng)};
    std::sort(x, x + 3);
    for (double e : {0.0, 1.0, -0.3, 1.7}) {
      const double whole = trapezoid_weighted(p1, e, x[0], x[2]);
      const double parts = trapezoid_weighted(p1, e, x[0], x[1]) + trapezoid_weighted(p1, e, x[1], x[2]);
      CHECK(std::abs(whole - parts) <= 1e-14 * (1 + std::abs(whole)) * 10);
      const double lin = 2 * trapezoid_weighted(p1, e, x[0], x[2]) - 3 * trapezoid_weighted(p2, e, x[0], x[2]);
      CHECK(std::abs(trapezoid_weighted(pm, e, x[0], x[2]) - lin) <= 1e-13 * (1 + std::abs(lin)));
    }
  }
}

TEST_CASE("weighted prefix agrees with direct integration") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> s(33);
  for (auto& v : s) v = U(rng);
  s.back() = 0.0;
  const RadialProfile p(0.125, s, 3.9);
  for (double e : {1.0, 0.3, 2.5}) {
    const WeightedPrefix P(p, e);
    for (int k = 0; k < 50; ++k) {
      const double x = U(rng) * p.r_max();
      CHECK(P(x) == doctest::Approx(trapezoid_weighted(p, e, 0.0, x)).epsilon(1e-13));
    }
    CHECK(P.at_node(1000) == P.total());
    CHECK(P(10.0) == P.total());
  }
}

TEST_CASE("interp examples and bracketing") {
  const RadialProfile p(1.0, {0.0, 1.0, 2.0}, 2.0);
  CHECK(interp(p, 0.5) == 0.5);
  CHECK(interp(p, 1.0) == 1.0);
  CHECK(interp(constant(0.1, 11, 3.0), 0.07) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(interp(p, -0.1), DomainError);
  CHECK_THROWS_AS(interp(p, 2.5), DomainError);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> s(21);
  for (auto& v : s) v = U(rng);
  const RadialProfile q(0.2, s, 4.0);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(interp(q, i * 0.2) == s[i]);
  for (int k = 0; k < 500; ++k) {
    const double r = (U(rng) + 1) * 2.0;
    const auto i = static_cast<std::size_t>(std::floor(r / 0.2));
    const double lo = std::min(s[i], s[std::min(i + 1, s.size() - 1)]);
    const double hi = std::max(s[i], s[std::min(i + 1, s.size() - 1)]);
    const double v = interp(q, r);
    CHECK(v >= lo - 1e-15);
    CHECK(v <= hi + 1e-15);
  }
}
