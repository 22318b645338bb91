#pragma once

// Weights of the solution space: tau_{+-}, N_gamma, the X(T) norm, the
// weight of the bilinear estimate and the time factor D_gamma(T).

#include <cstddef>
#include <utility>
#include <vector>

#include "hartree/history.hpp"
#include "hartree/report.hpp"

namespace hartree {

struct WeightParams {
  double gamma;
  double R;

  /// Throws DomainError unless gamma in (-1/2, 3) and R >= 1.
  void validate() const;
};

/// (tau_+, tau_-) = ((t + r + 2R)/R, (t - r + 2R)/R).
std::pair<double, double> tau(double r, double t, double R);

double n_gamma(double rho, double gamma);

/// tau_+ N_gamma(tau_-), the weight of the X(T) norm.
double x_weight(double r, double t, const WeightParams& p);

/// sup of x_weight * |u| over slices 0..up_to and nodes with r <= t + R.
double x_norm(const FieldHistory& u, const WeightParams& p, std::size_t up_to);

/// Running X norm after each slice (non-decreasing).
std::vector<double> x_norm_series(const FieldHistory& u, const WeightParams& p);

double w_weight(double r, double t, const WeightParams& p);

double d_gamma(double T, double gamma, double R);

/// Both sides of the elementary integral bound
///   \int_{|r-t|}^{r+t} (1+lambda)^-(kappa+1) dlambda <= rhs(kappa, r, t).
double lemma_integral_lhs(double kappa, double r, double t);
double lemma_integral_rhs(double kappa, double r, double t);

/// Random (kappa, r, t) checks of the bound above (samples per kappa branch)
/// and the empirical constant of the logarithmic variant.
EstimateReport verify_lemma_integrals(std::size_t samples, unsigned long long seed);
EstimateReport lemma_log_constant(std::size_t samples, unsigned long long seed);

}  // namespace hartree
