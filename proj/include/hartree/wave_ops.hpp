#pragma once

// Radial free-wave propagators and the damped Duhamel operator.
//
// For a radial phi the spherical mean reduces to
//   W(phi)(r, t) = (1/(2r)) \int_{|r-t|}^{r+t} lambda phi(lambda) dlambda,
// and the source term of the transformed problem enters as
//   L(G)(r, t) = \int_{t0}^{t} W(G(., s) / (1+s)^2)(r, t - s) ds.

#include <cstddef>
#include <span>
#include <vector>

#include "hartree/radial_core.hpp"

namespace hartree {

/// The backward characteristic region of (r, t) in the coordinates
/// alpha = s + lambda, beta = s - lambda.
struct ConeRegion {
  double r;
  double t;
  double R;

  double alpha_min() const;
  double alpha_max() const { return t + r; }
  double beta_min() const { return -R; }
  double beta_max() const { return t - r; }

  /// Exact membership of (alpha, beta) in the image of
  /// {(lambda, s) : 0 <= s <= t, |r - (t - s)| <= lambda <= r + t - s}.
  bool contains(double alpha, double beta) const;
  /// Membership in [alpha_min, alpha_max] x [beta_min, beta_max].
  bool in_box(double alpha, double beta) const;
};

double kirchhoff_radial(const RadialProfile& phi, double r, double t);
double dt_kirchhoff_radial(const RadialProfile& phi, double r, double t);
/// u0 = dt W(v0) + W(v0 + v1).
double free_field(const RadialProfile& v0, const RadialProfile& v1, double r, double t);

/// Free field with the prefix tables built once; node evaluation is O(1).
class FreeField {
 public:
  FreeField(const RadialProfile& v0, const RadialProfile& v1);

  double operator()(double r, double t) const;
  /// Value at r = i*h, t = n*h on the profiles' own grid.
  double at_node(std::size_t i, std::size_t n) const;

 private:
  RadialProfile v0_;
  RadialProfile sum_;
  WeightedPrefix prefix_;
  double h_;
};

/// \int over the right half-hat [a, a+h] of (1 - (s-a)/h) (1+s)^-2.
double hat_weight_right(double a, double h);
/// \int over the left half-hat [a-h, a] of (1 - (a-s)/h) (1+s)^-2.
double hat_weight_left(double a, double h);
/// Time weight of slice m (m < n) in a forward Duhamel sum started at t0.
double duhamel_weight(double t0, double h, std::size_t m);

/// Source slices G(., t0 + m h) on a common radial grid, with the prefix
/// Q_m(x) = \int_0^x lambda G_m of each slice.
class SourceHistory {
 public:
  SourceHistory(double h, double t0, std::size_t n_r);

  void push(std::vector<double> g);

  std::size_t size() const { return g_.size(); }
  std::size_t n_r() const { return n_r_; }
  double h() const { return h_; }
  double t0() const { return t0_; }
  double time(std::size_t m) const { return t0_ + static_cast<double>(m) * h_; }
  std::span<const double> slice(std::size_t m) const { return g_[m]; }

  /// Q_m at node k; nodes past the grid return the slice total.
  double prefix_at(std::size_t m, std::size_t k) const;
  double prefix(std::size_t m, double x) const;
  /// lambda G_m(lambda) with G_m linearly interpolated.
  double flux(std::size_t m, double lambda) const;

 private:
  double h_;
  double t0_;
  std::size_t n_r_;
  std::vector<std::vector<double>> g_;
  std::vector<std::vector<double>> q_;
};

/// Prefix table of lambda g(lambda) for a node slice.
std::vector<double> flux_prefix(std::span<const double> g, double h);

/// L(G)(r, t_n) from the first n slices of the history, O(n).
double duhamel(const SourceHistory& history, double r, std::size_t n);

/// Marching form of L: after slices 0..n-1 have been pushed, value(i) is
/// L(G)(r_i, t_n). Contributions are accumulated along the characteristics
/// i + n and i - n, so each push and each full slice of values is O(n_r + n_t).
class DuhamelMarch {
 public:
  DuhamelMarch(double h, double t0, std::size_t n_r, std::size_t n_t);

  void push(std::span<const double> g);
  /// Same, with g known to vanish beyond node `support`; costs O(support).
  void push(std::span<const double> g, std::size_t support);
  std::size_t count() const { return count_; }
  double value(std::size_t i) const;
  /// Values for all radial nodes at the current time.
  void values(std::span<double> out) const;

 private:
  // range additions [p, end) as point updates, read back by prefix sums
  struct Fenwick {
    std::vector<double> tree;
    void add(std::size_t p, double c);
    double prefix(std::size_t k) const;
  };

  double h_;
  double t0_;
  std::size_t n_r_;
  std::size_t n_t_;
  std::size_t count_ = 0;
  std::vector<double> plus_;   // indexed by i + n
  std::vector<double> minus_;  // indexed by i - n + (n_t - 1)
  std::vector<double> axis_;   // indexed by n
  // contributions of the saturated flux prefix beyond each slice's support
  Fenwick plus_tail_;
  Fenwick minus_tail_;
};

/// Backward form: \int_{t_n}^{t_N} W(G(., s) / (1+s)^2)(r, s - t_n) ds, the
/// part of the Duhamel integral still to come after t_n. Slices are pushed in
/// the order N, N-1, ...; after k pushes value(i) refers to n = N - k.
class ReverseDuhamelMarch {
 public:
  ReverseDuhamelMarch(double h, double t0, std::size_t n_r, std::size_t last);

  void push(std::span<const double> g);
  /// Time index the values refer to.
  std::size_t current() const { return last_ - count_; }
  double value(std::size_t i) const;

 private:
  double h_;
  double t0_;
  std::size_t n_r_;
  std::size_t last_;
  std::size_t count_ = 0;
  std::vector<double> plus_;   // indexed by i - n + N
  std::vector<double> minus_;  // indexed by i + n
  std::vector<double> axis_;   // indexed by n
};

}  // namespace hartree
