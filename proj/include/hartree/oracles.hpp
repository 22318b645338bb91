#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <cmath>
#include <numbers>
#include <random>

#include "hartree/radial_core.hpp"

namespace hartree::oracle {

struct McEstimate {
  double mean;
  double stderr_;
};

/// \int |x - y|^-gamma w(|y|) dy at |x| = r by importance sampling
/// rho = |x - y| with density ~ rho^(2-gamma) on [0, r + support] and a
/// uniform direction on the sphere.
inline McEstimate convolution_mc(const RadialProfile& w, double gamma, double r,
                                 std::size_t samples, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double rho_max = r + w.support_radius();
  const double e = 3.0 - gamma;
  const double scale = 4.0 * std::numbers::pi * std::pow(rho_max, e) / e;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double rho = rho_max * std::pow(U(rng), 1.0 / e);
    const double cz = 2.0 * U(rng) - 1.0;
    // |x + rho omega| with x on the z axis
    const double d = std::sqrt(std::max(0.0, r * r + rho * rho + 2.0 * r * rho * cz));
    const double v = d <= w.r_max() ? scale * interp(w, d) : 0.0;
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  return {mean, std::sqrt(var / (n - 1.0))};
}

/// Smooth random radial profile: a sum of a few random bumps inside [0, R].
inline RadialProfile random_profile(double h, std::size_t n, double R,
                                             std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int bumps = 1 + static_cast<int>(3 * U(rng));
  double c[4], s[4], a[4];
  for (int b = 0; b < bumps; ++b) {
    c[b] = R * U(rng);
    s[b] = 0.2 * R + 0.5 * R * U(rng);
    a[b] = 0.2 + U(rng);
  }
  return RadialProfile::sample(h, n, R, [&](double r) {
    double v = 0.0;
    for (int b = 0; b < bumps; ++b) {
      const double x = (r - c[b]) / s[b];
      if (std::abs(x) < 1.0) v += a[b] * std::pow(1.0 - x * x, 3);
    }
    return v * std::pow(1.0 - std::pow(r / R, 2), 2);
  });
}

}  // namespace hartree::oracle
