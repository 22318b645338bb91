#include "hartree/wave_ops.hpp"

#include <algorithm>
#include <cmath>

namespace hartree {

namespace {

double sample_or_zero(const RadialProfile& p, double x) {
  if (x > p.r_max() * (1.0 + 1e-12)) return 0.0;
  return interp(p, std::min(x, p.r_max()));
}

void check_cone(const RadialProfile& phi, double r, double t) {
  if (t < 0.0) throw DomainError("negative time");
  if (r < 0.0) throw DomainError("negative radius");
  if (r + t > phi.r_max() * (1.0 + 1e-12) + 1e-12) {
    throw DomainError("cone exits the profile grid");
  }
}

// centered difference, using the even extension across the axis
double derivative(const RadialProfile& phi, double x) {
  const double h = phi.h();
  const double right = sample_or_zero(phi, x + h);
  const double left = sample_or_zero(phi, std::abs(x - h));
  return (right - left) / (2.0 * h);
}

}  // namespace

double ConeRegion::alpha_min() const { return std::abs(t - r); }

bool ConeRegion::contains(double alpha, double beta) const {
  // lambda >= 0, s >= 0, s <= t and the two cone walls
  return alpha >= beta && alpha >= -beta && alpha <= r + t && alpha >= t - r &&
         beta <= t - r;
}

bool ConeRegion::in_box(double alpha, double beta) const {
  return alpha >= alpha_min() && alpha <= alpha_max() && beta >= beta_min() &&
         beta <= beta_max();
}

double kirchhoff_radial(const RadialProfile& phi, double r, double t) {
  check_cone(phi, r, t);
  if (t == 0.0) return 0.0;
  if (r < 0.5 * phi.h()) return t * interp(phi, t);
  return trapezoid_weighted(phi, 1.0, std::abs(r - t), r + t) / (2.0 * r);
}

double dt_kirchhoff_radial(const RadialProfile& phi, double r, double t) {
  check_cone(phi, r, t);
  if (r < 0.5 * phi.h()) return interp(phi, t) + t * derivative(phi, t);
  const double a = r + t;
  const double b = r - t;
  return (a * interp(phi, a) + b * interp(phi, std::abs(b))) / (2.0 * r);
}

double free_field(const RadialProfile& v0, const RadialProfile& v1, double r, double t) {
  return FreeField(v0, v1)(r, t);
}

namespace {

RadialProfile add_profiles(const RadialProfile& a, const RadialProfile& b) {
  if (a.size() != b.size() || a.h() != b.h()) {
    throw DomainError("free field data must share one grid");
  }
  std::vector<double> s(a.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = a[i] + b[i];
  return RadialProfile(a.h(), std::move(s), std::max(a.support_radius(), b.support_radius()));
}

}  // namespace

FreeField::FreeField(const RadialProfile& v0, const RadialProfile& v1)
    : v0_(v0), sum_(add_profiles(v0, v1)), prefix_(sum_, 1.0), h_(v0.h()) {}

double FreeField::operator()(double r, double t) const {
  if (t < 0.0 || r < 0.0) throw DomainError("free field: negative argument");
  if (t == 0.0) return sample_or_zero(v0_, r);
  if (r < 0.5 * h_) {
    return sample_or_zero(v0_, t) + t * derivative(v0_, t) + t * sample_or_zero(sum_, t);
  }
  const double a = r + t;
  const double b = r - t;
  const double dt_part =
      (a * sample_or_zero(v0_, a) + b * sample_or_zero(v0_, std::abs(b))) / (2.0 * r);
  const double w_part = (prefix_(a) - prefix_(std::abs(b))) / (2.0 * r);
  return dt_part + w_part;
}

double FreeField::at_node(std::size_t i, std::size_t n) const {
  const std::size_t size = v0_.size();
  const auto node = [&](const RadialProfile& p, std::size_t k) { return k < size ? p[k] : 0.0; };
  const double t = static_cast<double>(n) * h_;
  if (n == 0) return node(v0_, i);
  if (i == 0) {
    const double d = (node(v0_, n + 1) - node(v0_, n - 1)) / (2.0 * h_);
    return node(v0_, n) + t * d + t * node(sum_, n);
  }
  const double r = static_cast<double>(i) * h_;
  const std::size_t hi = i + n;
  const std::size_t lo = i > n ? i - n : n - i;
  const double a = r + t;
  const double b = r - t;
  const double dt_part = (a * node(v0_, hi) + b * node(v0_, lo)) / (2.0 * r);
  const double w_part = (prefix_.at_node(hi) - prefix_.at_node(lo)) / (2.0 * r);
  return dt_part + w_part;
}

double hat_weight_right(double a, double h) {
  const double x = h / (1.0 + a);
  double v;
  if (x < 1e-2) {
    // x - log1p(x)
    v = 0.0;
    double p = x * x;
    for (int k = 2; k <= 9; ++k) {
      v += ((k % 2 == 0) ? 1.0 : -1.0) * p / k;
      p *= x;
    }
  } else {
    v = x - std::log1p(x);
  }
  return v / h;
}

double hat_weight_left(double a, double h) {
  const double c = 1.0 + a - h;
  if (!(c > 0.0)) throw DomainError("hat weight: interval reaches s = -1");
  const double x = h / c;
  double v;
  if (x < 1e-2) {
    // log1p(x) - x/(1+x)
    v = 0.0;
    double p = x * x;
    for (int k = 2; k <= 10; ++k) {
      v += ((k % 2 == 0) ? 1.0 : -1.0) * p * (k - 1) / k;
      p *= x;
    }
  } else {
    v = std::log1p(x) - x / (1.0 + x);
  }
  return v / h;
}

double duhamel_weight(double t0, double h, std::size_t m) {
  const double a = t0 + static_cast<double>(m) * h;
  if (m == 0) return hat_weight_right(a, h);
  return hat_weight_right(a, h) + hat_weight_left(a, h);
}

std::vector<double> flux_prefix(std::span<const double> g, double h) {
  std::vector<double> q(g.size(), 0.0);
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    const double a = static_cast<double>(k) * h;
    const double b = a + h;
    const double m = a + 0.5 * h;
    // Simpson is exact for lambda times a linear function
    q[k + 1] = q[k] + h / 6.0 * (a * g[k] + 2.0 * m * (g[k] + g[k + 1]) + b * g[k + 1]);
  }
  return q;
}

SourceHistory::SourceHistory(double h, double t0, std::size_t n_r) : h_(h), t0_(t0), n_r_(n_r) {
  if (!(h > 0.0)) throw DomainError("source history: spacing must be positive");
  if (n_r < 2) throw DomainError("source history: need two radial nodes");
}

void SourceHistory::push(std::vector<double> g) {
  if (g.size() != n_r_) throw DomainError("source slice has the wrong length");
  q_.push_back(flux_prefix(g, h_));
  g_.push_back(std::move(g));
}

double SourceHistory::prefix_at(std::size_t m, std::size_t k) const {
  const auto& q = q_[m];
  return k < q.size() ? q[k] : q.back();
}

double SourceHistory::prefix(std::size_t m, double x) const {
  if (x < 0.0) throw DomainError("prefix: negative argument");
  const auto k = static_cast<std::size_t>(std::floor(x / h_));
  if (k + 1 >= n_r_) return q_[m].back();
  const double a = static_cast<double>(k) * h_;
  if (x == a) return q_[m][k];
  const auto& g = g_[m];
  const double s = (g[k + 1] - g[k]) / h_;
  const double d2 = (x * x - a * a) / 2.0;
  const double d3 = (x * x * x - a * a * a) / 3.0;
  return q_[m][k] + g[k] * d2 + s * (d3 - a * d2);
}

double SourceHistory::flux(std::size_t m, double lambda) const {
  const auto k = static_cast<std::size_t>(std::floor(lambda / h_));
  if (k + 1 > n_r_) return 0.0;
  if (k + 1 == n_r_) return lambda == static_cast<double>(k) * h_ ? lambda * g_[m][k] : 0.0;
  const auto& g = g_[m];
  const double frac = lambda / h_ - static_cast<double>(k);
  return lambda * (g[k] + (g[k + 1] - g[k]) * frac);
}

double duhamel(const SourceHistory& history, double r, std::size_t n) {
  if (n > history.size()) throw DomainError("duhamel: history shorter than requested time");
  const double h = history.h();
  const double r_max = static_cast<double>(history.n_r() - 1) * h;
  if (r < 0.0 || r > r_max * (1.0 + 1e-12)) throw DomainError("duhamel: r outside the grid");
  double acc = 0.0;
  const bool axis = r < 0.5 * h;
  for (std::size_t m = 0; m < n; ++m) {
    const double tau = static_cast<double>(n - m) * h;
    const double w = duhamel_weight(history.t0(), h, m);
    if (axis) {
      acc += w * history.flux(m, tau);
    } else {
      acc += w * (history.prefix(m, r + tau) - history.prefix(m, std::abs(r - tau)));
    }
  }
  return axis ? acc : acc / (2.0 * r);
}

DuhamelMarch::DuhamelMarch(double h, double t0, std::size_t n_r, std::size_t n_t)
    : h_(h),
      t0_(t0),
      n_r_(n_r),
      n_t_(n_t),
      plus_(n_r + n_t, 0.0),
      minus_(n_r + n_t, 0.0),
      axis_(n_t + 1, 0.0) {
  if (!(h > 0.0)) throw DomainError("duhamel march: spacing must be positive");
  if (n_r < 2 || n_t < 1) throw DomainError("duhamel march: empty grid");
  plus_tail_.tree.assign(plus_.size() + 1, 0.0);
  minus_tail_.tree.assign(minus_.size() + 1, 0.0);
}

void DuhamelMarch::Fenwick::add(std::size_t p, double c) {
  for (std::size_t k = p + 1; k < tree.size(); k += k & (~k + 1)) tree[k] += c;
}

double DuhamelMarch::Fenwick::prefix(std::size_t k) const {
  double s = 0.0;
  for (std::size_t j = k + 1; j > 0; j -= j & (~j + 1)) s += tree[j];
  return s;
}

void DuhamelMarch::push(std::span<const double> g) {
  if (g.size() != n_r_) throw DomainError("source slice has the wrong length");
  std::size_t support = n_r_ - 1;
  while (support > 0 && g[support] == 0.0) --support;
  push(g, support);
}

void DuhamelMarch::push(std::span<const double> g, std::size_t support) {
  if (g.size() != n_r_) throw DomainError("source slice has the wrong length");
  if (count_ >= n_t_) throw DomainError("duhamel march: grid exhausted");
  const std::size_t m = count_;
  const double w = duhamel_weight(t0_, h_, m);
  // the flux prefix is constant from node S on
  const std::size_t S = std::min(support + 1, n_r_ - 1);
  const auto q = flux_prefix(g.first(S + 1), h_);
  const double total = q[S];
  const std::size_t size = plus_.size();

  const std::size_t plus_end = std::min(size, m + S + 1);
  for (std::size_t k = m + 1; k < plus_end; ++k) plus_[k] += w * q[k - m];
  if (plus_end < size) plus_tail_.add(plus_end, w * total);

  // minus_ index j holds the characteristic d = j - (n_t - 1) + m
  const std::size_t c = n_t_ - 1 - m;
  const std::size_t lo = c > S ? c - S : 0;
  const std::size_t hi = std::min(size, c + S + 1);
  for (std::size_t j = lo; j < hi; ++j) minus_[j] += w * q[j > c ? j - c : c - j];
  if (hi < size) minus_tail_.add(hi, w * total);
  if (lo > 0) {
    minus_tail_.add(0, w * total);
    minus_tail_.add(lo, -w * total);
  }

  for (std::size_t k = 1; m + k < axis_.size() && k <= S; ++k) {
    axis_[m + k] += w * static_cast<double>(k) * h_ * g[k];
  }
  ++count_;
}

double DuhamelMarch::value(std::size_t i) const {
  const std::size_t n = count_;
  if (n >= n_t_) throw DomainError("duhamel march: time beyond the grid");
  if (i == 0) return axis_[n];
  const double r = static_cast<double>(i) * h_;
  const std::size_t j = i + n_t_ - 1 - n;
  const double plus = plus_[i + n] + plus_tail_.prefix(i + n);
  const double minus = minus_[j] + minus_tail_.prefix(j);
  return (plus - minus) / (2.0 * r);
}

void DuhamelMarch::values(std::span<double> out) const {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = value(i);
}

}  // namespace hartree

namespace hartree {

ReverseDuhamelMarch::ReverseDuhamelMarch(double h, double t0, std::size_t n_r, std::size_t last)
    : h_(h),
      t0_(t0),
      n_r_(n_r),
      last_(last),
      plus_(n_r + last + 1, 0.0),
      minus_(n_r + last + 1, 0.0),
      axis_(last + 1, 0.0) {
  if (!(h > 0.0)) throw DomainError("duhamel march: spacing must be positive");
  if (n_r < 2) throw DomainError("duhamel march: empty grid");
}

void ReverseDuhamelMarch::push(std::span<const double> g) {
  if (g.size() != n_r_) throw DomainError("source slice has the wrong length");
  if (count_ > last_) throw DomainError("duhamel march: grid exhausted");
  const std::size_t m = last_ - count_;
  const double a = t0_ + static_cast<double>(m) * h_;
  // the end slice only has the left half of its hat inside [t_n, t_N]
  double w = 0.0;
  if (m > 0) w = hat_weight_left(a, h_) + (count_ == 0 ? 0.0 : hat_weight_right(a, h_));
  const auto q = flux_prefix(g, h_);
  const double total = q.back();
  const auto Q = [&](std::size_t k) { return k < n_r_ ? q[k] : total; };
  for (std::size_t d = 0; d < plus_.size(); ++d) {
    if (m + d >= last_) plus_[d] += w * Q(m + d - last_);
  }
  for (std::size_t e = 0; e < minus_.size(); ++e) {
    minus_[e] += w * Q(e > m ? e - m : m - e);
  }
  for (std::size_t n = 0; n < m; ++n) {
    const std::size_t k = m - n;
    if (k < n_r_) axis_[n] += w * static_cast<double>(k) * h_ * g[k];
  }
  ++count_;
}

double ReverseDuhamelMarch::value(std::size_t i) const {
  const std::size_t n = current();
  if (i == 0) return axis_[n];
  const double r = static_cast<double>(i) * h_;
  return (plus_[i + last_ - n] - minus_[i + n]) / (2.0 * r);
}

}  // namespace hartree
