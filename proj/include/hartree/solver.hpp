#pragma once

// Solutions of u = u0 + L((V * u^2) u) on the characteristic grid.
//
// u is the Liouville variable u = (1+t) v of the damped problem; data are
// given for v at t = 0 and converted to (u, u_t) = (v0, v0 + v1).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hartree/history.hpp"
#include "hartree/radial_core.hpp"

namespace hartree {

class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(const std::string& what, std::size_t slice)
      : std::runtime_error(what), slice_(slice) {}
  std::size_t slice() const { return slice_; }

 private:
  std::size_t slice_;
};

enum class DataFamily { bump_v1_only, bump_both };

DataFamily parse_family(const std::string& name);
std::string family_name(DataFamily f);

/// eps (1 - (r/R)^2)^3 on r <= R, with the first two radial derivatives.
struct Bump {
  double epsilon;
  double R;
  double value(double r) const;
  double d1(double r) const;
  double d2(double r) const;
};

struct DataSpec {
  DataFamily family = DataFamily::bump_v1_only;
  double epsilon = 0.0;
  double R = 1.0;

  Bump v0() const { return {family == DataFamily::bump_both ? epsilon : 0.0, R}; }
  Bump v1() const { return {epsilon, R}; }
};

/// v-data sampled on a grid.
struct InitialData {
  RadialProfile v0;
  RadialProfile v1;
};

InitialData make_data(const DataSpec& spec, double h, std::size_t n_r);

/// sup_x sum_{|a|<=2} |d^a v0| + sum_{|b|<=1} |d^b v1| over Cartesian
/// multi-indices, evaluated on a fixed set of radii and directions.
double data_norm(const DataSpec& spec);

/// \int v1 dx.
double data_mass(const DataSpec& spec);

/// Data of the u-equation at time t0.
struct UData {
  RadialProfile u;
  RadialProfile ut;
  double t0 = 0.0;
};

UData to_udata(const InitialData& d);

struct Params {
  double gamma = 1.0;
  double R = 1.0;
  double epsilon = 0.0;
  double h = 1.0 / 64;
  double t_max = 10.0;
  double blowup_threshold = 1e6;
  /// Levels whose crossing times are recorded (log-linear in time).
  std::vector<double> thresholds{1e4, 1e6};
  std::size_t picard_max_iter = 40;
  double picard_tol = 1e-13;
  bool nonlinear = true;
  /// Store every slice of u and G; otherwise only scalar series are kept.
  bool keep_history = true;

  void validate() const;
  /// r_max = t_max + R (in units of the data grid).
  Grid grid() const;
};

/// Per-slice values handed to an observer while marching: the slice index,
/// time, u and V * u^2 (both up to the support node).
using SliceObserver = std::function<void(std::size_t, double, std::span<const double>,
                                         std::span<const double>)>;

struct SolutionHistory {
  Params params;
  double t0 = 0.0;
  FieldHistory u;
  FieldHistory g;
  std::vector<double> times;
  std::vector<double> sup_u;
  bool blew_up = false;
  std::optional<double> t_numeric;
  /// (threshold, crossing time) for each recorded level that was crossed.
  std::vector<std::pair<double, double>> crossings;

  std::size_t slices() const { return times.size(); }
};

SolutionHistory solve_march(const Params& p, const UData& data,
                            const SliceObserver& observe = {});
SolutionHistory solve_march(const Params& p, const InitialData& data,
                            const SliceObserver& observe = {});

/// Independent backend: w = r u solves w_tt - w_rr = r G / (1+t)^2, marched
/// with the exact-characteristic leapfrog and odd reflection at r = 0.
SolutionHistory solve_dalembert(const Params& p, const InitialData& data,
                                const SliceObserver& observe = {});

/// sqrt(2 pi / (3 M^2 C1 R^(3-gamma))).
double picard_time_bound(double gamma, double R, double M);

struct PicardResult {
  SolutionHistory solution;
  std::vector<double> differences;  // X norm of u_{k+1} - u_k
  std::vector<double> ratios;
  std::size_t iterations = 0;
  bool converged = false;
  double T = 0.0;
  double M = 0.0;
  double time_bound = 0.0;
  double c0_linear = 0.0;
  double data_size = 0.0;
  /// M > 6 N_gamma(4) C0 r and T <= time bound.
  bool precondition_ok = false;
  /// Some ratio above 0.6.
  bool contraction_failed = false;
};

/// Picard iteration u_{k+1} = u0 + L((V * u_k^2) u_k) on [0, T].
PicardResult picard_local(const Params& p, const DataSpec& spec, double T, double M);

/// Empirical C0 = sup (t + r + R) |u0| / data_norm over t <= t_max.
double free_decay_constant(const DataSpec& spec, double h, double t_max);

/// v = u / (1+t) slice by slice.
FieldHistory liouville(const FieldHistory& u);
FieldHistory inverse_liouville(const FieldHistory& v);

/// t -> (1+t) sup_r (1+t+r) |v|.
std::vector<double> dissipation_series(const FieldHistory& v);

struct ScatteringSeries {
  std::vector<double> times;
  /// sup_r (1+t+r) |u - u+| with the integral truncated at t_max.
  std::vector<double> truncated;
  /// Transported-profile estimate of the part beyond t_max.
  std::vector<double> tail;
  std::vector<double> total;
  bool decreasing = false;
  double final_over_initial = 0.0;
};

ScatteringSeries scattering_check(const SolutionHistory& s, double t_star);

/// sup |v_sigma - v'| where v' is computed from the rescaled data.
double scale_symmetry_check(const Params& p, const DataSpec& spec, double sigma);

}  // namespace hartree
