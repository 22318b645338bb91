#include "hartree/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hartree/potential.hpp"

namespace hartree {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSlack = 1e-12;

void check_negative_gamma(double gamma) {
  check_gamma(gamma);
  if (!(gamma < 0.0)) throw DomainError("blow-up analysis needs gamma in (-1/2, 0)");
}

RadialProfile over_support(double h, std::vector<double> v) {
  const double R = static_cast<double>(v.size() - 1) * h;
  return RadialProfile(h, std::move(v), R);
}

// up to the last support node, where the convolver's hats end as well
double r2_integral(const RadialProfile& p) {
  const double b = std::min(static_cast<double>(p.support_node()) * p.h(), p.r_max());
  return 4.0 * kPi * trapezoid_weighted(p, 2.0, 0.0, b);
}

// fails when lhs falls below rhs by more than the relative slack
bool below(double lhs, double rhs) {
  return lhs < rhs - kSlack * std::max(std::abs(lhs), std::abs(rhs));
}

}  // namespace

double mass(const RadialProfile& u) { return r2_integral(u); }

double mass_sq(const RadialProfile& u) {
  std::vector<double> sq(u.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = u[i] * u[i];
  return r2_integral(RadialProfile(u.h(), std::move(sq), u.support_radius()));
}

double mass_rhs(const RadialProfile& u, std::span<const double> conv, double t) {
  if (conv.size() < u.size()) throw DomainError("mass_rhs: convolution shorter than the slice");
  std::vector<double> prod(u.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = conv[i] * u[i];
  const double I = r2_integral(RadialProfile(u.h(), std::move(prod), u.support_radius()));
  return I / ((1.0 + t) * (1.0 + t));
}

double mass_rhs(const RadialProfile& u, double gamma, double t) {
  const std::size_t sn = std::min(u.size() - 1, u.support_node());
  const GridConvolver conv(gamma, u.h(), u.size());
  std::vector<double> w2(sn + 1), out(u.size(), 0.0);
  for (std::size_t i = 0; i <= sn; ++i) w2[i] = u[i] * u[i];
  conv.apply(w2, sn, std::span<double>(out.data(), sn + 1));
  return mass_rhs(u, out, t);
}

void MassSeries::push(double t_n, double F_n, double rhs_n, double sq_n) {
  t.push_back(t_n);
  F.push_back(F_n);
  rhs.push_back(rhs_n);
  sq.push_back(sq_n);
}

void MassSeries::finish(double h) {
  const std::size_t n = F.size();
  dF.assign(n, 0.0);
  d2F.assign(n, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    dF[k] = (F[k + 1] - F[k - 1]) / (2.0 * h);
    d2F[k] = (F[k + 1] - 2.0 * F[k] + F[k - 1]) / (h * h);
  }
}

SliceObserver mass_observer(MassSeries& out, double gamma, double h, double R) {
  (void)gamma;
  (void)R;
  return [&out, h](std::size_t, double t, std::span<const double> u,
                   std::span<const double> conv) {
    const RadialProfile p = over_support(h, std::vector<double>(u.begin(), u.end()));
    out.push(t, mass(p), mass_rhs(p, conv, t), mass_sq(p));
  };
}

MassSeries mass_series(const SolutionHistory& s) {
  if (s.u.slices() == 0) throw DomainError("mass_series needs the stored slices");
  MassSeries m;
  const double h = s.u.h();
  const double R = s.params.R;
  const GridConvolver conv(s.params.gamma, h, s.u.n_r());
  std::vector<double> w2(s.u.n_r()), out(s.u.n_r());
  for (std::size_t n = 0; n < s.u.slices(); ++n) {
    const double t = s.u.time(n);
    const std::size_t sn =
        std::min(s.u.n_r() - 1, cells_in(t - s.t0 + R, h));
    const auto row = s.u.row(n);
    const RadialProfile p = over_support(h, std::vector<double>(row.begin(), row.begin() + sn + 1));
    for (std::size_t i = 0; i <= sn; ++i) w2[i] = row[i] * row[i];
    conv.apply(std::span<const double>(w2.data(), sn + 1), sn, std::span<double>(out.data(), sn + 1));
    m.push(t, mass(p), mass_rhs(p, std::span<const double>(out.data(), sn + 1), t), mass_sq(p));
  }
  m.finish(h);
  return m;
}

std::pair<double, double> frame_check(double rhs_value, double F, double sq, double gamma,
                                      double t) {
  return {rhs_value, std::pow(2.0, -gamma) * F * std::pow(1.0 + t, -gamma - 2.0) * sq};
}

std::pair<double, double> frame2_check(double rhs_value, double F, double gamma, double t) {
  return {rhs_value,
          std::pow(2.0, -gamma - 2.0) * (3.0 / kPi) * std::pow(1.0 + t, -(gamma + 5.0)) * F * F * F};
}

EstimateReport identity_report(const MassSeries& m, const IdentityOptions& opt) {
  EstimateReport rep;
  rep.name = "identity";
  for (std::size_t k = 1; k + 1 < m.F.size(); ++k) {
    if (m.t[k] < opt.t_from - 1e-12 || m.t[k] > opt.t_to + 1e-12) continue;
    const double ref = std::abs(m.rhs[k]);
    const double rel = ref > 0.0 ? std::abs(m.d2F[k] - m.rhs[k]) / ref
                                 : (m.d2F[k] == 0.0 ? 0.0 : INFINITY);
    ++rep.samples;
    rep.max_ratio = std::max(rep.max_ratio, rel);
    if (rel > opt.rel_tol) ++rep.violations;
  }
  rep.note("rel_tol", opt.rel_tol);
  rep.note("t_from", opt.t_from);
  return rep;
}

namespace {

template <class Check>
EstimateReport inequality_report(const char* name, const MassSeries& m, Check check) {
  EstimateReport rep;
  rep.name = name;
  double min_lhs_over_rhs = INFINITY;
  for (std::size_t k = 0; k < m.F.size(); ++k) {
    const auto [lhs, rhs] = check(k);
    ++rep.samples;
    if (below(lhs, rhs)) ++rep.violations;
    if (lhs > 0.0) rep.max_ratio = std::max(rep.max_ratio, rhs / lhs);
    if (rhs > 0.0) min_lhs_over_rhs = std::min(min_lhs_over_rhs, lhs / rhs);
  }
  rep.note("min_lhs_over_rhs", min_lhs_over_rhs);
  return rep;
}

}  // namespace

EstimateReport frame_report(const MassSeries& m, double gamma) {
  return inequality_report("frame", m, [&](std::size_t k) {
    return frame_check(m.rhs[k], m.F[k], m.sq[k], gamma, m.t[k]);
  });
}

EstimateReport frame2_report(const MassSeries& m, double gamma) {
  return inequality_report("frame2", m,
                           [&](std::size_t k) { return frame2_check(m.rhs[k], m.F[k], gamma, m.t[k]); });
}

double t_gamma(double gamma) { return 2.0 / (2.0 + gamma); }

Envelope ode_envelope(double epsilon, double C0, double gamma, double F_start, double dF_start,
                      std::span<const double> t_grid) {
  check_negative_gamma(gamma);
  if (t_grid.empty()) throw DomainError("ode_envelope: empty time grid");
  Envelope e;
  e.t_gamma = t_gamma(gamma);
  if (t_grid.front() < e.t_gamma - 1e-12) throw DomainError("ode_envelope: grid starts before t_gamma");
  e.t0 = std::max(1.0, e.t_gamma);
  e.t1 = std::pow(2.0 * std::pow(e.t0, -gamma / 2.0), -2.0 / gamma);
  e.t2 = std::max(e.t0, e.t1);
  e.C2 = C0 * std::pow(2.0, -(2.0 * gamma + 5.0) / 2.0) / (-gamma);

  const double k = epsilon * epsilon * C0 * C0 * std::pow(2.0, -gamma - 1.0);
  const auto coef = [&](double t) { return k * t * t / std::pow(1.0 + t, gamma + 4.0); };
  // y = (F, F')
  double y0 = F_start, y1 = dF_start;
  e.t.assign(t_grid.begin(), t_grid.end());
  e.numeric.push_back(y0);
  for (std::size_t n = 1; n < t_grid.size(); ++n) {
    const double t = t_grid[n - 1], dt = t_grid[n] - t;
    const double k1a = y1, k1b = coef(t) * y0;
    const double k2a = y1 + 0.5 * dt * k1b, k2b = coef(t + 0.5 * dt) * (y0 + 0.5 * dt * k1a);
    const double k3a = y1 + 0.5 * dt * k2b, k3b = coef(t + 0.5 * dt) * (y0 + 0.5 * dt * k2a);
    const double k4a = y1 + dt * k3b, k4b = coef(t + dt) * (y0 + dt * k3a);
    y0 += dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    y1 += dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
    e.numeric.push_back(y0);
  }
  for (double t : e.t) {
    e.closed_form.push_back(epsilon * C0 * e.t0 * std::exp(epsilon * e.C2 * std::pow(t, -gamma / 2.0)));
  }
  return e;
}

EstimateReport envelope_report(const MassSeries& m, const Envelope& e) {
  EstimateReport rep;
  rep.name = "envelope";
  std::size_t closed_samples = 0, closed_bad = 0, first = m.t.size();
  for (std::size_t k = 0; k < m.t.size(); ++k) {
    if (std::abs(m.t[k] - e.t.front()) < 1e-9) {
      first = k;
      break;
    }
  }
  if (first == m.t.size()) throw DomainError("envelope_report: series and envelope do not overlap");
  double closed_ratio = 0.0;
  for (std::size_t n = 0; n < e.t.size() && first + n < m.t.size(); ++n) {
    const double F = m.F[first + n];
    ++rep.samples;
    if (below(F, e.numeric[n])) ++rep.violations;
    if (F > 0.0) rep.max_ratio = std::max(rep.max_ratio, e.numeric[n] / F);
    if (e.t[n] >= e.t2) {
      ++closed_samples;
      if (below(F, e.closed_form[n])) ++closed_bad;
      if (F > 0.0) closed_ratio = std::max(closed_ratio, e.closed_form[n] / F);
    }
  }
  rep.violations += closed_bad;
  rep.note("closed_form_samples", static_cast<double>(closed_samples));
  rep.note("closed_form_violations", static_cast<double>(closed_bad));
  rep.note("closed_form_max_ratio", closed_ratio);
  rep.note("t2", e.t2);
  return rep;
}

int kato_min_j(double gamma) {
  check_negative_gamma(gamma);
  return static_cast<int>(std::floor(-3.0 / gamma - 1.0)) + 1;
}

int kato_j1(double gamma, double delta) {
  check_negative_gamma(gamma);
  if (!(delta > 0.0)) throw DomainError("kato_j1: delta must be positive");
  const auto ok = [&](int j) {
    const double k = j + 1.0;
    return 2.0 * k / (gamma * k + 3.0) > 2.0 / gamma - delta;
  };
  // with k = j+1 and gamma k + 3 < 0 the condition reads k > 6/(delta gamma^2) - 3/gamma;
  // the closed form is then snapped against the condition itself
  const int lo = kato_min_j(gamma);
  int j = std::max(lo, static_cast<int>(std::floor(6.0 / (delta * gamma * gamma) - 3.0 / gamma)));
  while (!ok(j)) ++j;
  while (j > lo && ok(j - 1)) --j;
  return j;
}

KatoParams kato_bound(double gamma, int j, double epsilon, double C0, double t0, double delta) {
  check_negative_gamma(gamma);
  if (j < kato_min_j(gamma)) throw DomainError("kato_bound: j below the admissible minimum");
  if (!(epsilon > 0.0) || !(C0 > 0.0) || !(t0 > 0.0)) {
    throw DomainError("kato_bound needs positive epsilon, C0 and t0");
  }
  KatoParams k;
  k.j = j;
  k.delta = delta;
  k.q = gamma + 5.0;
  k.a = -gamma * j / 2.0;
  k.B_coef = std::pow(2.0, -gamma - 2.0) * 3.0 / kPi;
  k.M = (k.p - 1.0) / 2.0 * k.a - k.q / 2.0 + 1.0;
  const double C2 = C0 * std::pow(2.0, -(2.0 * gamma + 5.0) / 2.0) / (-gamma);
  const double logA = (1.0 + j) * std::log(epsilon) + std::log(C0 * t0) + j * std::log(C2) -
                      std::lgamma(j + 1.0);
  k.A = std::exp(logA);
  k.T0 = std::exp(-(k.p - 1.0) / (2.0 * k.M) * logA);
  k.eps_exponent = -(k.p - 1.0) / (2.0 * k.M) * (1.0 + j);
  k.exponent_ok = k.eps_exponent > 2.0 / gamma - delta;
  return k;
}

bool taylor_bound_holds(double x, int j) {
  if (x < 0.0 || j < 0) throw DomainError("taylor bound needs x >= 0 and j >= 0");
  if (x == 0.0) return true;
  return x >= j * std::log(x) - std::lgamma(j + 1.0);
}

}  // namespace hartree
