#include "hartree/radial_core.hpp"

#include <algorithm>
#include <cmath>

#include "gauss.hpp"

namespace hartree {

Grid::Grid(double h, std::size_t n_r, std::size_t n_t) : h_(h), n_r_(n_r), n_t_(n_t) {
  if (!(h > 0.0)) throw DomainError("grid spacing must be positive");
  if (n_r < 2) throw DomainError("grid needs at least two radial nodes");
  if (n_t < 1) throw DomainError("grid needs at least one time slice");
}

std::size_t cells_in(double x, double h) {
  if (x <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(x / h - 1e-9));
}

Grid Grid::covering(double h, double r_extent, double t_extent) {
  return Grid(h, cells_in(r_extent, h) + 1, cells_in(t_extent, h) + 1);
}

RadialProfile::RadialProfile(double h, std::vector<double> samples, double support_radius)
    : h_(h), samples_(std::move(samples)), support_radius_(support_radius) {
  if (!(h > 0.0)) throw DomainError("profile spacing must be positive");
  if (samples_.size() < 2) throw DomainError("profile needs at least two samples");
  if (support_radius < 0.0) throw DomainError("negative support radius");
  const std::size_t last = samples_.size() - 1;
  if (support_radius > r_max() * (1.0 + 1e-12) + 1e-12) {
    throw DomainError("support radius exceeds the profile extent");
  }
  support_node_ = std::min(last, cells_in(support_radius, h));
}

RadialProfile RadialProfile::sample(double h, std::size_t n, double support_radius,
                                    const std::function<double(double)>& f) {
  std::vector<double> s(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = static_cast<double>(i) * h;
    if (r <= support_radius * (1.0 + 1e-12)) s[i] = f(r);
  }
  return RadialProfile(h, std::move(s), support_radius);
}

RadialProfile RadialProfile::zeros(double h, std::size_t n) {
  return RadialProfile(h, std::vector<double>(n, 0.0), 0.0);
}

namespace detail {

namespace {

double power_moment(double e, double x0, double x1) {
  const double k = e + 1.0;
  if (std::abs(k) < 1e-14) return std::log(x1 / x0);
  return (std::pow(x1, k) - std::pow(x0, k)) / k;
}

bool is_small_integer(double e) { return e >= 0.0 && e <= 12.0 && e == std::floor(e); }

}  // namespace

double cell_integral(double pa, double slope, double a, double e, double x0, double x1) {
  if (x1 <= x0) return 0.0;
  const auto integrand = [&](double x) { return std::pow(x, e) * (pa + slope * (x - a)); };
  if (e == 0.0) {
    // exact for the linear interpolant
    return 0.5 * (integrand(x0) + integrand(x1)) * (x1 - x0);
  }
  if (is_small_integer(e)) {
    const auto pts = (static_cast<std::size_t>(e) + 3) / 2;
    return integrate(gauss_rule(pts), x0, x1, integrand);
  }
  if (x0 < 2.0 * (x1 - x0)) {
    // near the origin: closed-form moments of x^e and x^(e+1)
    const double c0 = pa - slope * a;
    return c0 * power_moment(e, x0, x1) + slope * power_moment(e + 1.0, x0, x1);
  }
  return integrate(gauss_rule(8), x0, x1, integrand);
}

}  // namespace detail

namespace {

double cell_value(const RadialProfile& p, std::size_t i, double e, double x0, double x1) {
  // cell [i h, (i+1) h]; beyond the support node the interpolant is zero
  if (i >= p.support_node()) return 0.0;
  const double h = p.h();
  const double a = static_cast<double>(i) * h;
  const double slope = (p[i + 1] - p[i]) / h;
  return detail::cell_integral(p[i], slope, a, e, x0, x1);
}

}  // namespace

double trapezoid_weighted(const RadialProfile& p, double weight_exponent, double a, double b) {
  const double tol = 1e-12 * std::max(1.0, p.r_max());
  if (a < 0.0 || a > b) throw DomainError("trapezoid_weighted: need 0 <= a <= b");
  if (b > p.r_max() + tol) throw DomainError("trapezoid_weighted: b exceeds r_max");
  if (a == 0.0 && weight_exponent <= -1.0) {
    throw DomainError("trapezoid_weighted: weight not integrable at the origin");
  }
  b = std::min(b, p.r_max());
  if (b == a) return 0.0;
  const double h = p.h();
  auto first = static_cast<std::size_t>(std::floor(a / h));
  auto last = static_cast<std::size_t>(std::floor(b / h));
  const std::size_t n_cells = p.size() - 1;
  first = std::min(first, n_cells - 1);
  last = std::min(last, n_cells - 1);
  double acc = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    const double lo = std::max(a, static_cast<double>(i) * h);
    const double hi = std::min(b, static_cast<double>(i + 1) * h);
    acc += cell_value(p, i, weight_exponent, lo, hi);
  }
  return acc;
}

double interp(const RadialProfile& p, double r) {
  const double tol = 1e-12 * std::max(1.0, p.r_max());
  if (r < 0.0 || r > p.r_max() + tol) throw DomainError("interp: r outside [0, r_max]");
  const double x = r / p.h();
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-12 * std::max(1.0, x)) {
    return p[std::min(static_cast<std::size_t>(nearest), p.size() - 1)];
  }
  const auto i = static_cast<std::size_t>(std::floor(x));
  if (i >= p.size() - 1) return p[p.size() - 1];
  const double frac = x - static_cast<double>(i);
  return p[i] + (p[i + 1] - p[i]) * frac;
}

WeightedPrefix::WeightedPrefix(const RadialProfile& p, double weight_exponent)
    : profile_(p), exponent_(weight_exponent), cumulative_(p.size(), 0.0) {
  const double h = p.h();
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double lo = static_cast<double>(i) * h;
    cumulative_[i + 1] = cumulative_[i] + cell_value(p, i, exponent_, lo, lo + h);
  }
}

double WeightedPrefix::operator()(double x) const {
  const RadialProfile& p = profile_;
  if (x < 0.0) throw DomainError("WeightedPrefix: negative argument");
  const double h = p.h();
  const auto i = static_cast<std::size_t>(std::floor(x / h));
  if (i + 1 >= p.size()) return cumulative_.back();
  const double lo = static_cast<double>(i) * h;
  if (x == lo) return cumulative_[i];
  return cumulative_[i] + cell_value(p, i, exponent_, lo, x);
}

}  // namespace hartree
