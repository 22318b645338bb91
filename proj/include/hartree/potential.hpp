#pragma once

// Radial convolution with V(x) = |x|^-gamma, gamma in (-1/2, 3).
//
// After the angular integration, (V * w)(r) = \int_0^inf k(r, rho) w(rho) drho
// with the shell kernel
//   k(r, rho) = (2 pi rho / r) [H(r + rho) - H(|r - rho|)],
//   H(x) = (x^(2-gamma) - 1)/(2-gamma)      (log x when gamma = 2).
// The constant shift in H cancels and makes the gamma -> 2 limit continuous.
//
// Quadrature interpolates p = rho * w linearly and integrates each hat of p
// against H exactly near the diagonal rho = r, so the grid sum is a Toeplitz
// plus Hankel product; large grids evaluate it with FFTs.

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "hartree/radial_core.hpp"

namespace hartree {

void check_gamma(double gamma);

class PotentialKernel {
 public:
  explicit PotentialKernel(double gamma);

  double gamma() const { return gamma_; }
  /// H(x) for x >= 0.
  double antiderivative(double x) const;
  /// k(r, rho); r = 0 gives the limit 4 pi rho^(2-gamma).
  double operator()(double r, double rho) const;

 private:
  double gamma_;
  double beta_;
  bool log_branch_;
};

/// \int (1 - |u - c|/h) H(|u|) du over the full hat [c-h, c+h] or one half.
enum class HatPart { full, left, right };
double hat_kernel_integral(double gamma, double h, double c, HatPart part);

/// (V * w)(r) for a profile w on its own grid.
double convolve_power(const RadialProfile& w, double gamma, double r);

class GridConvolver {
 public:
  enum class Method { automatic, direct, fft };

  /// Kernel tables for profiles of up to n_max nodes with spacing h.
  GridConvolver(double gamma, double h, std::size_t n_max);
  ~GridConvolver();
  GridConvolver(const GridConvolver&) = delete;
  GridConvolver& operator=(const GridConvolver&) = delete;

  double gamma() const { return gamma_; }
  double h() const { return h_; }
  std::size_t n_max() const { return n_max_; }

  /// out[i] = (V * w)(i h) for i < out.size(), where w is the interpolant of
  /// w[0..support_node] and zero beyond. out.size() must be <= n_max.
  void apply(std::span<const double> w, std::size_t support_node, std::span<double> out,
             Method method = Method::automatic) const;
  std::vector<double> apply(const RadialProfile& w, Method method = Method::automatic) const;

 private:
  struct FftPlan;
  const FftPlan& plan(std::size_t length) const;
  void raw_direct(std::span<const double> p, std::span<double> c) const;
  void raw_fft(std::span<const double> p, std::span<double> c) const;

  double gamma_;
  double h_;
  std::size_t n_max_;
  std::vector<double> k_full_;  // hat integral at c = k h, k >= 0
  std::vector<double> k_left_;
  std::vector<double> k_right_;
  mutable std::map<std::size_t, std::unique_ptr<FftPlan>> plans_;
};

}  // namespace hartree
