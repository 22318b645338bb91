#pragma once

// Mass functional F(t) = \int u dx of a blowing-up run, the identity
// F'' = (1+t)^-2 \int (V * u^2) u dx, the lower-bound chain for F and the
// improved-Kato parameter calculus.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "hartree/radial_core.hpp"
#include "hartree/report.hpp"
#include "hartree/solver.hpp"

namespace hartree {

/// 4 pi \int r^2 u dr over the support of the slice.
double mass(const RadialProfile& u);

/// 4 pi \int r^2 u^2 dr.
double mass_sq(const RadialProfile& u);

/// 4 pi (1+t)^-2 \int r^2 (V * u^2) u dr.
double mass_rhs(const RadialProfile& u, double gamma, double t);
/// Same with V * u^2 already sampled on the nodes of u.
double mass_rhs(const RadialProfile& u, std::span<const double> conv, double t);

struct MassSeries {
  std::vector<double> t;
  std::vector<double> F;
  std::vector<double> rhs;  // mass_rhs per slice
  std::vector<double> sq;   // 4 pi \int r^2 u^2
  /// Centered differences at interior slices (0 at the ends).
  std::vector<double> dF;
  std::vector<double> d2F;

  void push(double t_n, double F_n, double rhs_n, double sq_n);
  void finish(double h);
};

/// Observer that fills a MassSeries while the solver marches.
SliceObserver mass_observer(MassSeries& out, double gamma, double h, double R);

MassSeries mass_series(const SolutionHistory& s);

/// Kernel lower bound: lhs = mass_rhs, rhs = 2^-gamma F (1+t)^(-gamma-2) \int u^2.
std::pair<double, double> frame_check(double rhs_value, double F, double sq, double gamma,
                                      double t);
/// Cubic lower bound (kernel bound plus Cauchy-Schwarz): lhs = mass_rhs,
/// rhs = 2^(-gamma-2) (3/pi) (1+t)^-(gamma+5) F^3.
std::pair<double, double> frame2_check(double rhs_value, double F, double gamma, double t);

struct IdentityOptions {
  double rel_tol = 1e-3;
  /// Interior slices with t_from <= t <= t_to are compared.
  double t_from = 0.0;
  double t_to = INFINITY;
};

/// Mass identity and the two lower bounds over a mass series.
EstimateReport identity_report(const MassSeries& m, const IdentityOptions& opt = {});
EstimateReport frame_report(const MassSeries& m, double gamma);
EstimateReport frame2_report(const MassSeries& m, double gamma);

/// 2 / (2 + gamma).
double t_gamma(double gamma);

struct Envelope {
  double t_gamma = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double C2 = 0.0;
  std::vector<double> t;
  /// Comparison ODE solution started from the simulated F, F' at t_gamma.
  std::vector<double> numeric;
  /// eps C0 t0 exp(eps C2 t^(-gamma/2)), meaningful for t >= t2.
  std::vector<double> closed_form;
};

/// C0 is \int v1 with eps factored out.
Envelope ode_envelope(double epsilon, double C0, double gamma, double F_start, double dF_start,
                      std::span<const double> t_grid);

/// F dominates both envelope series on the common slices (closed form only
/// for t >= t2).
EstimateReport envelope_report(const MassSeries& m, const Envelope& e);

struct KatoParams {
  double p = 3.0;
  double q = 0.0;
  double a = 0.0;
  double A = 0.0;
  double B_coef = 0.0;
  double M = 0.0;
  int j = 0;
  double delta = 0.0;
  /// D0 A^(-(p-1)/(2M)) with D0 = 1.
  double T0 = 0.0;
  /// T0 scales like eps^eps_exponent.
  double eps_exponent = 0.0;
  bool exponent_ok = false;
};

/// Smallest admissible j: floor(-3/gamma - 1) + 1.
int kato_min_j(double gamma);
/// Smallest j with 2(j+1)/(gamma(j+1)+3) > 2/gamma - delta.
int kato_j1(double gamma, double delta);
KatoParams kato_bound(double gamma, int j, double epsilon, double C0, double t0,
                      double delta = 0.1);

/// exp(x) >= x^j / j!, evaluated in logs.
bool taylor_bound_holds(double x, int j);

}  // namespace hartree
