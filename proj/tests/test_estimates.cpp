#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hartree/estimates.hpp"
#include "hartree/norms.hpp"
#include "hartree/solver.hpp"

using namespace hartree;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("bilinear constants") {
  // gamma in (-1/2, 2): 16 pi min(1, 2-g) (1 - 3^(-2g-1)) / ((2-g)(2g+1))
  CHECK(bilinear_constant(0.0, 1.0) == doctest::Approx(16 * kPi / 3).epsilon(1e-14));
  CHECK(bilinear_constant(1.0, 1.0) == doctest::Approx(16 * kPi / 3 * 26.0 / 27.0).epsilon(1e-14));
  CHECK(bilinear_constant(1.5, 7.0) == bilinear_constant(1.5, 1.0));
  // gamma in (2, 3): both pieces positive and the far piece is bounded as gamma -> 2+
  for (double g : {2.01, 2.5, 2.99}) CHECK(bilinear_constant(g, 1.0) > 0.0);
  const double near = std::pow(4.0, 8) * 2 * kPi / (std::pow(3.0, 8) * 0.5 * std::pow(2.0, 0.5));
  const double far = 4 * kPi * 32.0 * 0.5 * (1 - std::pow(3.0, -5)) / (5 * 0.5);
  CHECK(bilinear_constant(2.5, 1.0) == doctest::Approx(near + far).epsilon(1e-14));
  // gamma = 2 grows like log^2(1+R)
  CHECK(bilinear_constant(2.0, 8.0) / bilinear_constant(2.0, 2.0) > std::log(9.0) / std::log(3.0));
  CHECK_THROWS(bilinear_constant(3.0, 1.0));
}

TEST_CASE("bilinear bound is C1 over the weight away from gamma = 2") {
  for (double g : {-0.4, 1.0, 2.5}) {
    for (double r : {0.0, 1.0, 5.0}) {
      const double t = 3.0;
      CHECK(bilinear_bound(r, t, g, 1.0) * w_weight(r, t, {g, 1.0}) ==
            doctest::Approx(bilinear_constant(g, 1.0)).epsilon(1e-13));
    }
  }
}

TEST_CASE("bilinear estimate holds on saturating and random inputs") {
  BilinearOptions opt;
  opt.T_over_R = 10;
  opt.random_profiles = 30;
  for (double g : {-0.4, 0.0, 1.0, 1.9, 2.5, 2.9}) {
    const auto rep = verify_bilinear(g, 1.0, 1.0 / 16, opt);
    CAPTURE(g);
    CHECK(rep.violations == 0);
    CHECK(rep.max_ratio > 0.0);
    CHECK(rep.max_ratio < 1.0);
  }
  const auto rep2 = verify_bilinear(2.0, 2.0, 1.0 / 16, opt);
  CHECK(rep2.violations == 0);
  CHECK_THROWS_AS(verify_bilinear(2.0, 1.0, 1.0 / 16, opt), DomainError);
}

TEST_CASE("trilinear estimate: bound and bounded growth for gamma > 0") {
  const auto a = verify_trilinear(1.0, 1.0, 256.0, 0.25);
  CHECK(a.report.violations == 0);
  CHECK(a.growth_slope < 0.1);
  CHECK(a.shape_ok);
  const auto b = verify_trilinear(-0.4, 1.0, 64.0, 0.25);
  CHECK(b.report.violations == 0);
  // the norm grows and the growth slows down
  CHECK(b.norm.back() > b.norm.front());
  REQUIRE(b.T.size() >= 4);
  CHECK(b.growth_slope > 0.0);
  for (std::size_t k = 1; k < b.norm.size(); ++k) CHECK(b.norm[k] <= b.bound[k]);
}

TEST_CASE("linfty representation") {
  // |W phi| <= t sup|phi| always; phi = 1 attains it on the cone interior
  const auto rep = verify_linfty(100, 3, 1.0 / 32);
  CHECK(rep.max_ratio <= 2.0 + 1e-12);
  CHECK(rep.max_ratio > 1.9);
  CHECK(rep.violations > 0);
}

TEST_CASE("free decay constant stabilises") {
  const DataSpec spec{DataFamily::bump_v1_only, 1.0, 1.0};
  const auto r = verify_free_decay(spec, 1.0 / 32, 100.0);
  CHECK(r.c0_up_to_50 > 0.0);
  CHECK(std::abs(r.relative_change) < 0.01);
  CHECK(r.c0_up_to_100 == doctest::Approx(free_decay_constant(spec, 1.0 / 32, 100.0)).epsilon(1e-14));
  // C0 does not depend on epsilon
  const auto r2 = verify_free_decay({DataFamily::bump_v1_only, 3.0, 1.0}, 1.0 / 32, 60.0);
  CHECK(r2.c0_up_to_100 == doctest::Approx(r.c0_up_to_100).epsilon(1e-12));
}
