#pragma once

// Characteristic-aligned grids, radial profiles and the quadrature primitives
// everything else is built on.
//
// The grid uses the same spacing h in r and t, so every cone boundary
// r +/- (t - s) of a Duhamel integral lands on a node.

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hartree {

class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

class Grid {
 public:
  Grid(double h, std::size_t n_r, std::size_t n_t);

  /// Smallest grid with spacing h reaching at least r_extent and t_extent.
  static Grid covering(double h, double r_extent, double t_extent);

  double h() const { return h_; }
  std::size_t n_r() const { return n_r_; }
  std::size_t n_t() const { return n_t_; }
  double r_max() const { return static_cast<double>(n_r_ - 1) * h_; }
  double t_max() const { return static_cast<double>(n_t_ - 1) * h_; }
  double r(std::size_t i) const { return static_cast<double>(i) * h_; }
  double t(std::size_t n) const { return static_cast<double>(n) * h_; }

 private:
  double h_;
  std::size_t n_r_;
  std::size_t n_t_;
};

/// Number of whole cells in x / h, tolerant to rounding (x = 1.0, h = 1/64 -> 64).
std::size_t cells_in(double x, double h);

/// A radial function sampled at r_i = i*h.  Quadratures treat the profile as
/// the piecewise-linear interpolant of the samples on [0, support_node*h] and
/// zero beyond, so a profile that jumps at a node-aligned support edge (an
/// indicator) is integrated exactly.
class RadialProfile {
 public:
  RadialProfile(double h, std::vector<double> samples, double support_radius);

  /// Samples f on n nodes; nodes with r_i > support_radius are set to zero.
  static RadialProfile sample(double h, std::size_t n, double support_radius,
                              const std::function<double(double)>& f);
  static RadialProfile zeros(double h, std::size_t n);

  double h() const { return h_; }
  std::size_t size() const { return samples_.size(); }
  double r_max() const { return static_cast<double>(samples_.size() - 1) * h_; }
  double support_radius() const { return support_radius_; }
  /// Last node of the integration support.
  std::size_t support_node() const { return support_node_; }
  std::span<const double> samples() const { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }

 private:
  double h_;
  std::vector<double> samples_;
  double support_radius_;
  std::size_t support_node_;
};

/// \int_a^b lambda^e p(lambda) dlambda with the power factor integrated exactly
/// against the piecewise-linear interpolant of p on every cell.
double trapezoid_weighted(const RadialProfile& p, double weight_exponent, double a,
                          double b);

/// Piecewise-linear interpolation, exact at nodes.
double interp(const RadialProfile& p, double r);

/// Cumulative integrals P(x) = \int_0^x lambda^e p(lambda) dlambda tabulated at
/// the nodes, for O(1) evaluation of many integrals over the same profile.
class WeightedPrefix {
 public:
  WeightedPrefix(const RadialProfile& p, double weight_exponent);

  /// P at node i; nodes beyond the profile return the total.
  double at_node(std::size_t i) const {
    return i < cumulative_.size() ? cumulative_[i] : cumulative_.back();
  }
  /// P at an arbitrary x >= 0.
  double operator()(double x) const;
  double total() const { return cumulative_.back(); }

 private:
  RadialProfile profile_;
  double exponent_;
  std::vector<double> cumulative_;
};

namespace detail {

/// \int_{x0}^{x1} lambda^e (pa + slope*(lambda - a)) dlambda for a sub-interval
/// [x0, x1] of the cell starting at a.
double cell_integral(double pa, double slope, double a, double e, double x0,
                     double x1);

}  // namespace detail

}  // namespace hartree
