#include "hartree/norms.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gauss.hpp"
#include "hartree/potential.hpp"
#include "hartree/radial_core.hpp"

namespace hartree {

namespace {

constexpr double kBranchTol = 1e-12;

bool is_two(double gamma) { return std::abs(gamma - 2.0) <= kBranchTol; }

double bracket(double x) { return 1.0 + std::abs(x); }

}  // namespace

void WeightParams::validate() const {
  check_gamma(gamma);
  if (!(R >= 1.0)) throw DomainError("R must be >= 1");
}

std::pair<double, double> tau(double r, double t, double R) {
  return {(t + r + 2.0 * R) / R, (t - r + 2.0 * R) / R};
}

double n_gamma(double rho, double gamma) {
  if (is_two(gamma)) return rho == 0.0 ? 0.0 : rho * rho * rho / std::log1p(rho);
  if (gamma < 2.0) return std::pow(rho, gamma + 1.0);
  return rho * rho * rho;
}

double x_weight(double r, double t, const WeightParams& p) {
  const auto [tp, tm] = tau(r, t, p.R);
  return tp * n_gamma(tm, p.gamma);
}

double x_norm(const FieldHistory& u, const WeightParams& p, std::size_t up_to) {
  double best = 0.0;
  const std::size_t last = std::min(up_to + 1, u.slices());
  for (std::size_t n = 0; n < last; ++n) {
    const double t = u.time(n);
    const auto row = u.row(n);
    for (std::size_t i = 0; i < row.size(); ++i) {
      const double r = u.r(i);
      if (r > t + p.R + 1e-12 * (1.0 + t)) break;
      if (row[i] != 0.0) best = std::max(best, x_weight(r, t, p) * std::abs(row[i]));
    }
  }
  return best;
}

std::vector<double> x_norm_series(const FieldHistory& u, const WeightParams& p) {
  std::vector<double> out(u.slices());
  double run = 0.0;
  for (std::size_t n = 0; n < u.slices(); ++n) {
    const double t = u.time(n);
    const auto row = u.row(n);
    for (std::size_t i = 0; i < row.size(); ++i) {
      const double r = u.r(i);
      if (r > t + p.R + 1e-12 * (1.0 + t)) break;
      if (row[i] != 0.0) run = std::max(run, x_weight(r, t, p) * std::abs(row[i]));
    }
    out[n] = run;
  }
  return out;
}

double w_weight(double r, double t, const WeightParams& p) {
  const double tp = tau(r, t, p.R).first;
  if (is_two(p.gamma)) return std::log1p(p.R) / p.R * tp * tp / std::log1p(tp);
  if (p.gamma < 2.0) return std::pow(p.R, p.gamma - 3.0) * std::pow(tp, p.gamma);
  return std::pow(p.R, p.gamma - 3.0) * tp * tp;
}

double d_gamma(double T, double gamma, double R) {
  if (!(T > 0.0)) throw DomainError("d_gamma needs T > 0");
  if (gamma > 0.0) return 1.0 / gamma;
  if (gamma == 0.0) return std::log((T + 2.0 * R) / R);
  return std::pow((T + R) / R, -gamma) / (-gamma);
}

double lemma_integral_lhs(double kappa, double r, double t) {
  const double a = std::abs(r - t), b = r + t;
  const double span = std::log1p(b) - std::log1p(a);
  if (kappa == 0.0) return span;
  // [(1+a)^-k - (1+b)^-k] / k
  return -std::pow(1.0 + a, -kappa) * std::expm1(-kappa * span) / kappa;
}

double lemma_integral_rhs(double kappa, double r, double t) {
  const double m = std::min(r, t);
  if (kappa > 0.0) {
    return 2.0 * std::max(1.0, kappa) / kappa * m /
           (bracket(t + r) * std::pow(bracket(t - r), kappa));
  }
  if (kappa == 0.0) return std::log(bracket(t + r) / bracket(t - r));
  return 2.0 * std::max(1.0, -kappa) / (-kappa) * m / std::pow(bracket(t + r), kappa + 1.0);
}

EstimateReport verify_lemma_integrals(std::size_t samples, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, 4.0), neg(-2.0, 0.0), rt(0.0, 100.0);
  EstimateReport rep;
  rep.name = "lemma_integrals";
  for (int branch = 0; branch < 3; ++branch) {
    std::size_t bad = 0;
    double worst = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
      double kappa = 0.0;
      if (branch == 0) {
        do kappa = pos(rng); while (kappa == 0.0);
      } else if (branch == 2) {
        kappa = neg(rng);
      }
      const double r = rt(rng), t = rt(rng);
      const double lhs = lemma_integral_lhs(kappa, r, t);
      const double rhs = lemma_integral_rhs(kappa, r, t);
      if (lhs > rhs * (1.0 + 1e-12)) ++bad;
      if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
    }
    rep.samples += samples;
    rep.violations += bad;
    rep.max_ratio = std::max(rep.max_ratio, worst);
    const char* tag[] = {"kappa_pos", "kappa_zero", "kappa_neg"};
    rep.note(std::string(tag[branch]) + "_max_ratio", worst);
    rep.note(std::string(tag[branch]) + "_violations", static_cast<double>(bad));
  }
  rep.empirical_constant = rep.max_ratio;
  return rep;
}

namespace {

// \int_a^b (1+lambda)^(1-kappa) log(2+lambda) dlambda in x = log(1+lambda).
double log_variant_lhs(double kappa, double a, double b) {
  const double xa = std::log1p(a), xb = std::log1p(b);
  if (xb <= xa) return 0.0;
  const auto rule = detail::gauss_rule(8);
  constexpr int panels = 32;
  const double step = (xb - xa) / panels;
  double acc = 0.0;
  for (int k = 0; k < panels; ++k) {
    acc += detail::integrate(rule, xa + k * step, xa + (k + 1) * step, [&](double x) {
      const double l = std::expm1(x);
      return std::exp((2.0 - kappa) * x) * std::log(2.0 + l);
    });
  }
  return acc;
}

}  // namespace

EstimateReport lemma_log_constant(std::size_t samples, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, 4.0), rt(0.0, 100.0);
  EstimateReport rep;
  rep.name = "lemma_log_constant";
  for (std::size_t k = 0; k < samples; ++k) {
    double kappa;
    do kappa = pos(rng); while (kappa == 0.0);
    const double r = rt(rng), t = rt(rng);
    const double lhs = log_variant_lhs(kappa, std::abs(r - t), r + t);
    const double rhs = std::min(r, t) * std::log1p(bracket(t - r)) /
                       (bracket(t + r) * std::pow(bracket(t - r), kappa));
    ++rep.samples;
    if (rhs > 0.0) rep.max_ratio = std::max(rep.max_ratio, lhs / rhs);
  }
  // C is not given explicitly, so nothing is asserted.
  rep.empirical_constant = rep.max_ratio;
  return rep;
}

}  // namespace hartree
