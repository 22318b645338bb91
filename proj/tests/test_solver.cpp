#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hartree/norms.hpp"
#include "hartree/solver.hpp"

using namespace hartree;

namespace {

constexpr double kPi = std::numbers::pi;

double simpson(double a, double b, int n, const auto& f) {
  if (b <= a) return 0.0;
  const double dx = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * dx);
  return s * dx / 3.0;
}

// Kirchhoff for u(0) = 0, u_t(0) = g radial
double kirchhoff_oracle(const Bump& g, double r, double t) {
  const auto f = [&](double rho) { return rho * g.value(rho); };
  const double lo = std::abs(r - t), hi = std::min(r + t, g.R);
  if (r == 0.0) return t * g.value(t);
  return simpson(lo, std::max(lo, hi), 4000, f) / (2.0 * r);
}

Params small(double gamma, double eps) {
  Params p;
  p.gamma = gamma;
  p.epsilon = eps;
  p.R = 1.0;
  p.h = 1.0 / 32;
  p.t_max = 3.0;
  return p;
}

SolutionHistory run(const Params& p, DataFamily fam = DataFamily::bump_v1_only) {
  const DataSpec spec{fam, p.epsilon, p.R};
  return solve_march(p, make_data(spec, p.h, p.grid().n_r()));
}

}  // namespace

TEST_CASE("bump derivatives against differences") {
  const Bump b{0.7, 1.5};
  for (double r : {0.1, 0.4, 0.9, 1.3}) {
    const double d = 1e-5;
    CHECK(b.d1(r) == doctest::Approx((b.value(r + d) - b.value(r - d)) / (2 * d)).epsilon(1e-8));
    CHECK(b.d2(r) == doctest::Approx((b.d1(r + d) - b.d1(r - d)) / (2 * d)).epsilon(1e-8));
  }
  CHECK(b.value(0) == 0.7);
  CHECK(b.value(1.5) == 0.0);
  CHECK(b.value(2.0) == 0.0);
}

TEST_CASE("data mass and data norm") {
  const DataSpec spec{DataFamily::bump_v1_only, 1.0, 1.0};
  CHECK(data_mass(spec) == doctest::Approx(64 * kPi / 315).epsilon(1e-15));
  const Bump b = spec.v1();
  const double quad = simpson(0.0, 1.0, 2000, [&](double r) { return 4 * kPi * r * r * b.value(r); });
  CHECK(data_mass(spec) == doctest::Approx(quad).epsilon(1e-12));
  CHECK(data_mass({DataFamily::bump_both, 2.0, 3.0}) == doctest::Approx(2.0 * 27.0 * 0.6382918).epsilon(1e-6));

  // v0 = 0: sup |v1| + |v1'| sum_i |w_i|, maximised along the diagonal
  double oracle = 0.0;
  for (int j = 0; j <= 20000; ++j) {
    const double r = j / 20000.0;
    oracle = std::max(oracle, std::abs(b.value(r)) + std::sqrt(3.0) * std::abs(b.d1(r)));
  }
  const double dn = data_norm(spec);
  CHECK(dn <= oracle * (1 + 1e-12));
  CHECK(dn >= oracle * 0.99);
  CHECK(data_norm({DataFamily::bump_v1_only, 0.0, 1.0}) == 0.0);
  // linear in epsilon
  CHECK(data_norm({DataFamily::bump_both, 2.0, 1.0}) ==
        doctest::Approx(2.0 * data_norm({DataFamily::bump_both, 1.0, 1.0})).epsilon(1e-14));
}

TEST_CASE("family names") {
  CHECK(parse_family("bump_v1_only") == DataFamily::bump_v1_only);
  CHECK(parse_family(family_name(DataFamily::bump_both)) == DataFamily::bump_both);
  CHECK_THROWS(parse_family("gaussian"));
}

TEST_CASE("params validation") {
  Params p = small(1.0, 0.1);
  CHECK_NOTHROW(p.validate());
  p.R = 0.5;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = small(3.0, 0.1);
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = small(-0.5, 0.1);
  CHECK_THROWS_AS(p.validate(), DomainError);
  CHECK_THROWS(make_data({DataFamily::bump_v1_only, -1.0, 1.0}, 0.1, 10));
}

TEST_CASE("zero data stays zero") {
  const auto s = run(small(1.0, 0.0));
  for (double v : s.u.data()) CHECK(v == 0.0);
  for (double v : s.sup_u) CHECK(v == 0.0);
  CHECK_FALSE(s.blew_up);
}

TEST_CASE("linear run matches the Kirchhoff integral") {
  Params p = small(1.0, 1.0);
  p.nonlinear = false;
  const auto s = run(p);
  const Bump b{1.0, 1.0};
  double worst = 0.0;
  for (std::size_t n = 0; n < s.slices(); n += 7) {
    for (std::size_t i = 0; i < s.u.n_r(); i += 3) {
      worst = std::max(worst, std::abs(s.u(n, i) - kirchhoff_oracle(b, s.u.r(i), s.u.time(n))));
    }
  }
  CHECK(worst < 5 * p.h * p.h);
}

TEST_CASE("finite propagation speed") {
  for (double gamma : {-0.4, 1.0, 2.5}) {
    const auto s = run(small(gamma, 0.5), DataFamily::bump_both);
    for (std::size_t n = 0; n < s.slices(); ++n) {
      const double t = s.u.time(n);
      for (std::size_t i = 0; i < s.u.n_r(); ++i) {
        if (s.u.r(i) > t + 1.0 + 1e-12) CHECK(s.u(n, i) == 0.0);
      }
    }
  }
}

TEST_CASE("positive data give a positive solution") {
  // v1 >= 0, v0 = 0 and a nonnegative source keep u >= 0
  const auto s = run(small(1.0, 2.0));
  double most_negative = 0.0;
  for (double v : s.u.data()) most_negative = std::min(most_negative, v);
  CHECK(most_negative >= -1e-14);
}

TEST_CASE("march and d'Alembert backends agree for small data") {
  Params p = small(1.0, 1e-3);
  p.t_max = 20.0;
  const DataSpec spec{DataFamily::bump_v1_only, 1e-3, 1.0};
  const auto d = make_data(spec, p.h, p.grid().n_r());
  const auto a = solve_march(p, d);
  const auto b = solve_dalembert(p, d);
  REQUIRE(a.slices() == b.slices());
  double worst = 0.0;
  for (std::size_t k = 0; k < a.u.data().size(); ++k)
    worst = std::max(worst, std::abs(a.u.data()[k] - b.u.data()[k]));
  CHECK(worst <= 5 * p.h * p.h);
}

TEST_CASE("backend difference shrinks at second order") {
  for (double gamma : {-0.4, 1.0, 2.0, 2.5}) {
    double diff[2];
    for (int k = 0; k < 2; ++k) {
      Params p = small(gamma, 1.0);
      p.h /= (1 << k);
      const DataSpec spec{DataFamily::bump_both, 1.0, 1.0};
      const auto d = make_data(spec, p.h, p.grid().n_r());
      const auto a = solve_march(p, d);
      const auto b = solve_dalembert(p, d);
      diff[k] = 0.0;
      for (std::size_t j = 0; j < a.u.data().size(); ++j)
        diff[k] = std::max(diff[k], std::abs(a.u.data()[j] - b.u.data()[j]));
    }
    CAPTURE(gamma);
    CHECK(std::log2(diff[0] / diff[1]) > 1.8);
  }
}

TEST_CASE("free parts of the two backends coincide off the axis") {
  Params p = small(1.0, 1.0);
  p.nonlinear = false;
  const DataSpec spec{DataFamily::bump_both, 1.0, 1.0};
  const auto d = make_data(spec, p.h, p.grid().n_r());
  const auto a = solve_march(p, d);
  const auto b = solve_dalembert(p, d);
  for (std::size_t n = 0; n < a.slices(); ++n)
    for (std::size_t i = 1; i < a.u.n_r(); ++i) CHECK(std::abs(a.u(n, i) - b.u(n, i)) < 1e-13);
}

TEST_CASE("march converges at second order") {
  Params p = small(1.0, 2.0);
  p.t_max = 2.0;
  double err[2];
  const DataSpec spec{DataFamily::bump_both, p.epsilon, p.R};
  for (int k = 0; k < 2; ++k) {
    Params coarse = p, fine = p;
    coarse.h = p.h / (1 << k);
    fine.h = coarse.h / 2;
    const auto a = solve_march(coarse, make_data(spec, coarse.h, coarse.grid().n_r()));
    const auto b = solve_march(fine, make_data(spec, fine.h, fine.grid().n_r()));
    double worst = 0.0;
    for (std::size_t n = 0; n < a.slices(); ++n)
      for (std::size_t i = 0; i < a.u.n_r(); ++i)
        worst = std::max(worst, std::abs(a.u(n, i) - b.u(2 * n, 2 * i)));
    err[k] = worst;
  }
  CHECK(std::log2(err[0] / err[1]) == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("liouville transform round trip") {
  const auto s = run(small(0.5, 1.0));
  const auto v = liouville(s.u);
  const auto back = inverse_liouville(v);
  for (std::size_t k = 0; k < back.data().size(); ++k) {
    const double a = s.u.data()[k], b = back.data()[k];
    CHECK(std::abs(a - b) <= 2 * std::numeric_limits<double>::epsilon() * std::abs(a));
  }
  for (std::size_t n = 0; n < v.slices(); ++n)
    CHECK(v(n, 0) == doctest::Approx(s.u(n, 0) / (1 + v.time(n))));
}

TEST_CASE("numerical abort on blow-up data") {
  Params p = small(-0.4, 40.0);
  p.t_max = 20.0;
  p.blowup_threshold = 1e6;
  const auto s = run(p);
  CHECK(s.blew_up);
  REQUIRE(s.t_numeric.has_value());
  CHECK(*s.t_numeric < 20.0);
  for (double v : s.sup_u) CHECK(std::isfinite(v));
  REQUIRE_FALSE(s.crossings.empty());
  CHECK(s.crossings.front().first == 1e4);
}

TEST_CASE("picard iteration contracts for small data") {
  Params p = small(1.0, 1e-3);
  p.h = 1.0 / 32;
  const DataSpec spec{DataFamily::bump_v1_only, 1e-3, 1.0};
  const double M = 0.34;
  const double T = std::min(0.9, picard_time_bound(1.0, 1.0, M));
  const auto res = picard_local(p, spec, T, M);
  CHECK(res.converged);
  CHECK_FALSE(res.contraction_failed);
  CHECK(res.precondition_ok);
  for (double r : res.ratios) CHECK(r <= 0.6);
  const auto direct = solve_march([&] { Params q = p; q.t_max = T; return q; }(),
                                  make_data(spec, p.h, [&] { Params q = p; q.t_max = T; return q.grid().n_r(); }()));
  double worst = 0.0;
  for (std::size_t k = 0; k < direct.u.data().size(); ++k)
    worst = std::max(worst, std::abs(direct.u.data()[k] - res.solution.u.data()[k]));
  CHECK(worst < 1e-12);
}

TEST_CASE("scale symmetry") {
  Params p = small(1.0, 0.5);
  p.R = 2.0;
  p.t_max = 2.0;
  const DataSpec spec{DataFamily::bump_both, 0.5, 2.0};
  CHECK(scale_symmetry_check(p, spec, 2.0) < 1e-12);
  CHECK(scale_symmetry_check(p, spec, 0.5) < 1e-12);
  CHECK(scale_symmetry_check(p, spec, 1.0) < 1e-13);
  CHECK_THROWS_AS(scale_symmetry_check(p, {DataFamily::bump_both, 0.5, 1.0}, 2.0), DomainError);
  CHECK_THROWS_AS(scale_symmetry_check(p, spec, 3.0), DomainError);
}

TEST_CASE("dissipation series of a linear run stays bounded") {
  Params p = small(1.0, 1.0);
  p.nonlinear = false;
  p.t_max = 10.0;
  const auto s = run(p);
  const auto d = dissipation_series(liouville(s.u));
  REQUIRE(d.size() == s.slices());
  double hi = 0.0;
  for (double v : d) hi = std::max(hi, v);
  CHECK(d.back() <= hi);
  CHECK(d.back() > 0.25 * hi);
}
