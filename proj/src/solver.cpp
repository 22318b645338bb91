#include "hartree/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "hartree/estimates.hpp"
#include "hartree/norms.hpp"
#include "hartree/potential.hpp"
#include "hartree/wave_ops.hpp"

namespace hartree {

namespace {

constexpr double kPi = std::numbers::pi;

RadialProfile difference(const RadialProfile& a, const RadialProfile& b) {
  if (a.size() != b.size() || a.h() != b.h()) throw DomainError("data must share one grid");
  std::vector<double> s(a.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = a[i] - b[i];
  return RadialProfile(a.h(), std::move(s), std::max(a.support_radius(), b.support_radius()));
}

double support_of(const UData& d) {
  return std::max(d.u.support_radius(), d.ut.support_radius());
}

// Records threshold crossings and the stop condition.
class CrossingTracker {
 public:
  CrossingTracker(const Params& p, SolutionHistory& out) : p_(p), out_(out) {
    levels_ = p.thresholds;
    levels_.push_back(p.blowup_threshold);
    std::sort(levels_.begin(), levels_.end());
    levels_.erase(std::unique(levels_.begin(), levels_.end()), levels_.end());
  }

  /// Returns true when the march must stop.
  bool record(double t, double sup) {
    for (double level : levels_) {
      if (sup > level && prev_sup_ <= level && !crossed(level)) {
        double tc = t;
        if (prev_sup_ > 0.0 && have_prev_) {
          tc = prev_t_ + (t - prev_t_) * (std::log(level) - std::log(prev_sup_)) /
                             (std::log(sup) - std::log(prev_sup_));
        }
        out_.crossings.emplace_back(level, tc);
      }
    }
    have_prev_ = true;
    prev_t_ = t;
    prev_sup_ = sup;
    if (sup > p_.blowup_threshold) {
      out_.blew_up = true;
      for (const auto& [level, tc] : out_.crossings) {
        if (level == p_.blowup_threshold) out_.t_numeric = tc;
      }
      return true;
    }
    return false;
  }

 private:
  bool crossed(double level) const {
    for (const auto& c : out_.crossings) {
      if (c.first == level) return true;
    }
    return false;
  }

  const Params& p_;
  SolutionHistory& out_;
  std::vector<double> levels_;
  bool have_prev_ = false;
  double prev_t_ = 0.0;
  double prev_sup_ = 0.0;
};

struct MarchSetup {
  double h;
  std::size_t n_r;
  std::size_t n_t;
  double support;
};

MarchSetup setup(const Params& p, const UData& data) {
  p.validate();
  const double h = data.u.h();
  if (data.ut.h() != h || data.ut.size() != data.u.size()) {
    throw DomainError("data profiles must share one grid");
  }
  MarchSetup s{h, data.u.size(), cells_in(p.t_max, h) + 1, support_of(data)};
  if (cells_in(p.t_max + s.support, h) + 1 > s.n_r) {
    throw DomainError("radial grid does not cover t_max + R");
  }
  return s;
}

std::size_t support_node(const MarchSetup& s, std::size_t n) {
  return std::min(s.n_r - 1, cells_in(static_cast<double>(n) * s.h + s.support, s.h));
}

void check_finite(std::span<const double> row, std::size_t n) {
  for (double v : row) {
    if (!std::isfinite(v)) throw NumericalAbort("non-finite value in slice", n);
  }
}

SolutionHistory start_history(const Params& p, const MarchSetup& s, double t0) {
  SolutionHistory out;
  out.params = p;
  out.t0 = t0;
  out.u = FieldHistory(s.h, t0, s.n_r);
  out.g = FieldHistory(s.h, t0, s.n_r);
  if (p.keep_history) {
    out.u.reserve(s.n_t);
    out.g.reserve(s.n_t);
  }
  return out;
}

// Fills g = (V * u^2) u and cu = V * u^2 up to the support node.
void source(const GridConvolver& conv, std::span<const double> u, std::size_t sn,
            std::vector<double>& w2, std::vector<double>& cu, std::vector<double>& g) {
  for (std::size_t i = 0; i <= sn; ++i) w2[i] = u[i] * u[i];
  conv.apply(std::span<const double>(w2.data(), sn + 1), sn,
             std::span<double>(cu.data(), sn + 1));
  // the support node never shrinks, so entries beyond sn are still zero
  for (std::size_t i = 0; i <= sn; ++i) g[i] = cu[i] * u[i];
}

// Common per-slice bookkeeping; returns true to stop.
bool finish_slice(const Params& p, SolutionHistory& out, CrossingTracker& track,
                  const SliceObserver& observe, std::size_t n, double t,
                  std::span<const double> u, std::size_t sn, const std::vector<double>& cu,
                  const std::vector<double>& g) {
  double sup = 0.0;
  for (std::size_t i = 0; i <= sn; ++i) sup = std::max(sup, std::abs(u[i]));
  out.times.push_back(t);
  out.sup_u.push_back(sup);
  if (p.keep_history) {
    auto ru = out.u.append();
    std::copy(u.begin(), u.end(), ru.begin());
    auto rg = out.g.append();
    std::copy(g.begin(), g.end(), rg.begin());
  }
  if (observe) observe(n, t, u.first(sn + 1), std::span<const double>(cu.data(), sn + 1));
  return track.record(t, sup);
}

}  // namespace

DataFamily parse_family(const std::string& name) {
  if (name == "bump_v1_only") return DataFamily::bump_v1_only;
  if (name == "bump_both") return DataFamily::bump_both;
  throw DomainError("unknown data family: " + name);
}

std::string family_name(DataFamily f) {
  return f == DataFamily::bump_v1_only ? "bump_v1_only" : "bump_both";
}

double Bump::value(double r) const {
  if (r >= R) return 0.0;
  const double q = 1.0 - (r / R) * (r / R);
  return epsilon * q * q * q;
}

double Bump::d1(double r) const {
  if (r >= R) return 0.0;
  const double q = 1.0 - (r / R) * (r / R);
  return epsilon * 3.0 * q * q * (-2.0 * r / (R * R));
}

double Bump::d2(double r) const {
  if (r >= R) return 0.0;
  const double q = 1.0 - (r / R) * (r / R);
  const double R2 = R * R;
  return epsilon * (24.0 * r * r / (R2 * R2) * q - 6.0 / R2 * q * q);
}

InitialData make_data(const DataSpec& spec, double h, std::size_t n_r) {
  if (!(spec.epsilon >= 0.0)) throw DomainError("epsilon must be >= 0");
  const Bump b0 = spec.v0(), b1 = spec.v1();
  return {RadialProfile::sample(h, n_r, spec.R, [&](double r) { return b0.value(r); }),
          RadialProfile::sample(h, n_r, spec.R, [&](double r) { return b1.value(r); })};
}

double data_norm(const DataSpec& spec) {
  const Bump b0 = spec.v0(), b1 = spec.v1();
  // directions: a Fibonacci sphere plus the coordinate axes
  std::vector<std::array<double, 3>> dirs{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const int nd = 400;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < nd; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / nd;
    const double s = std::sqrt(1.0 - z * z);
    dirs.push_back({s * std::cos(golden * k), s * std::sin(golden * k), z});
  }
  double best = 0.0;
  const int nr = 400;
  for (int j = 0; j <= nr; ++j) {
    const double r = spec.R * j / nr;
    const double f0 = b0.value(r), f1 = b0.d1(r), f2 = b0.d2(r);
    // f'(r)/r -> f''(0) on the axis
    const double f1r = r > 0.0 ? f1 / r : f2;
    const double g0 = b1.value(r), g1 = b1.d1(r);
    for (const auto& w : dirs) {
      double acc = std::abs(f0) + std::abs(g0);
      for (int i = 0; i < 3; ++i) {
        acc += std::abs(f1 * w[i]) + std::abs(g1 * w[i]);
        for (int k = i; k < 3; ++k) {
          const double delta = i == k ? 1.0 : 0.0;
          acc += std::abs(f2 * w[i] * w[k] + f1r * (delta - w[i] * w[k]));
        }
      }
      best = std::max(best, acc);
    }
  }
  return best;
}

double data_mass(const DataSpec& spec) {
  return spec.epsilon * 64.0 * kPi / 315.0 * spec.R * spec.R * spec.R;
}

UData to_udata(const InitialData& d) {
  std::vector<double> s(d.v0.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = d.v0[i] + d.v1[i];
  const double R = std::max(d.v0.support_radius(), d.v1.support_radius());
  return {d.v0, RadialProfile(d.v0.h(), std::move(s), R), 0.0};
}

void Params::validate() const {
  check_gamma(gamma);
  if (!(R >= 1.0)) throw DomainError("R must be >= 1");
  if (!(h > 0.0)) throw DomainError("h must be positive");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("t_max must be finite and positive");
  if (!(blowup_threshold > 0.0)) throw DomainError("blowup_threshold must be positive");
}

Grid Params::grid() const { return Grid::covering(h, t_max + R, t_max); }

SolutionHistory solve_march(const Params& p, const UData& data, const SliceObserver& observe) {
  const MarchSetup s = setup(p, data);
  const FreeField ff(data.u, difference(data.ut, data.u));
  const GridConvolver conv(p.gamma, s.h, s.n_r);
  DuhamelMarch march(s.h, data.t0, s.n_r, s.n_t);
  SolutionHistory out = start_history(p, s, data.t0);
  CrossingTracker track(p, out);
  std::vector<double> u(s.n_r, 0.0), w2(s.n_r), cu(s.n_r, 0.0), g(s.n_r, 0.0);
  for (std::size_t n = 0; n < s.n_t; ++n) {
    const double t = data.t0 + static_cast<double>(n) * s.h;
    const std::size_t sn = support_node(s, n);
    for (std::size_t i = 0; i <= sn; ++i) {
      u[i] = ff.at_node(i, n) + (p.nonlinear ? march.value(i) : 0.0);
    }
    check_finite(std::span<const double>(u.data(), sn + 1), n);
    if (p.nonlinear || observe) source(conv, u, sn, w2, cu, g);
    if (!p.nonlinear) std::fill(g.begin(), g.end(), 0.0);
    check_finite(std::span<const double>(g.data(), sn + 1), n);
    if (finish_slice(p, out, track, observe, n, t, u, sn, cu, g)) break;
    if (p.nonlinear && n + 1 < s.n_t) march.push(g, sn);
  }
  return out;
}

SolutionHistory solve_march(const Params& p, const InitialData& data,
                            const SliceObserver& observe) {
  return solve_march(p, to_udata(data), observe);
}

SolutionHistory solve_dalembert(const Params& p, const InitialData& data,
                                const SliceObserver& observe) {
  const UData ud = to_udata(data);
  const MarchSetup s = setup(p, ud);
  const GridConvolver conv(p.gamma, s.h, s.n_r);
  SolutionHistory out = start_history(p, s, ud.t0);
  CrossingTracker track(p, out);
  const double h = s.h;
  const std::size_t N = s.n_r;
  std::vector<double> prev(N, 0.0), cur(N, 0.0), next(N, 0.0);
  std::vector<double> u(N, 0.0), w2(N), cu(N, 0.0), g(N, 0.0);
  const auto at = [&](const std::vector<double>& w, std::size_t i) { return i < N ? w[i] : 0.0; };
  const WeightedPrefix vel(ud.ut, 1.0);

  for (std::size_t i = 0; i < N; ++i) cur[i] = static_cast<double>(i) * h * ud.u[i];
  for (std::size_t n = 0; n < s.n_t; ++n) {
    const double t = ud.t0 + static_cast<double>(n) * h;
    const std::size_t sn = support_node(s, n);
    std::fill(u.begin(), u.end(), 0.0);
    if (n == 0) {
      for (std::size_t i = 0; i <= sn; ++i) u[i] = ud.u[i];
    } else {
      for (std::size_t i = 1; i <= sn; ++i) u[i] = cur[i] / (static_cast<double>(i) * h);
      // u(0) from the even extension of u; exact for even quadratics
      u[0] = (4.0 * u[1] - u[2]) / 3.0;
    }
    check_finite(std::span<const double>(u.data(), sn + 1), n);
    if (p.nonlinear || observe) source(conv, u, sn, w2, cu, g);
    if (!p.nonlinear) std::fill(g.begin(), g.end(), 0.0);
    check_finite(std::span<const double>(g.data(), sn + 1), n);
    if (finish_slice(p, out, track, observe, n, t, u, sn, cu, g)) break;
    if (n + 1 >= s.n_t) break;

    const double damp = 1.0 / ((1.0 + t) * (1.0 + t));
    next[0] = 0.0;
    for (std::size_t i = 1; i < N; ++i) {
      const double r = static_cast<double>(i) * h;
      const double f = r * g[i] * damp;
      if (n == 0) {
        next[i] = 0.5 * (at(cur, i + 1) + cur[i - 1]) +
                  0.5 * (vel.at_node(i + 1) - vel.at_node(i - 1)) + 0.5 * h * h * f;
      } else {
        next[i] = at(cur, i + 1) + cur[i - 1] - prev[i] + h * h * f;
      }
    }
    std::swap(prev, cur);
    std::swap(cur, next);
  }
  return out;
}

double picard_time_bound(double gamma, double R, double M) {
  return std::sqrt(2.0 * kPi / (3.0 * M * M * bilinear_constant(gamma, R) * std::pow(R, 3.0 - gamma)));
}

double free_decay_constant(const DataSpec& spec, double h, double t_max) {
  const double norm = data_norm(spec);
  if (norm == 0.0) return 0.0;
  const std::size_t n_r = cells_in(t_max + spec.R, h) + 1;
  const InitialData d = make_data(spec, h, n_r);
  const UData ud = to_udata(d);
  const FreeField ff(ud.u, difference(ud.ut, ud.u));
  double best = 0.0;
  const std::size_t n_t = cells_in(t_max, h) + 1;
  for (std::size_t n = 0; n < n_t; ++n) {
    const double t = static_cast<double>(n) * h;
    const std::size_t sn = std::min(n_r - 1, cells_in(t + spec.R, h));
    for (std::size_t i = 0; i <= sn; ++i) {
      const double r = static_cast<double>(i) * h;
      best = std::max(best, (t + r + spec.R) * std::abs(ff.at_node(i, n)));
    }
  }
  return best / norm;
}

PicardResult picard_local(const Params& p_in, const DataSpec& spec, double T, double M) {
  Params p = p_in;
  p.t_max = T;
  p.keep_history = true;
  p.validate();
  if (!(T > 0.0) || !(M > 0.0)) throw DomainError("picard_local needs T > 0 and M > 0");
  PicardResult res;
  res.T = T;
  res.M = M;
  res.time_bound = picard_time_bound(p.gamma, p.R, M);
  res.data_size = data_norm(spec);
  res.c0_linear = free_decay_constant(spec, p.h, std::max(T, 20.0 * spec.R));
  res.precondition_ok =
      M > 6.0 * n_gamma(4.0, p.gamma) * res.c0_linear * res.data_size && T <= res.time_bound;

  const Grid grid = p.grid();
  const InitialData d = make_data(spec, p.h, grid.n_r());
  const UData ud = to_udata(d);
  const MarchSetup s = setup(p, ud);
  const FreeField ff(ud.u, difference(ud.ut, ud.u));
  const GridConvolver conv(p.gamma, s.h, s.n_r);
  const WeightParams wp{p.gamma, p.R};

  FieldHistory cur(s.h, 0.0, s.n_r);
  for (std::size_t n = 0; n < s.n_t; ++n) {
    auto row = cur.append();
    const std::size_t sn = support_node(s, n);
    for (std::size_t i = 0; i <= sn; ++i) row[i] = ff.at_node(i, n);
  }
  FieldHistory g_hist(s.h, 0.0, s.n_r);
  std::vector<double> w2(s.n_r), cu(s.n_r), g(s.n_r);

  for (std::size_t k = 0; k < p.picard_max_iter; ++k) {
    DuhamelMarch march(s.h, 0.0, s.n_r, s.n_t);
    FieldHistory next(s.h, 0.0, s.n_r);
    g_hist = FieldHistory(s.h, 0.0, s.n_r);
    for (std::size_t n = 0; n < s.n_t; ++n) {
      const std::size_t sn = support_node(s, n);
      auto row = next.append();
      for (std::size_t i = 0; i <= sn; ++i) row[i] = ff.at_node(i, n) + march.value(i);
      source(conv, cur.row(n), sn, w2, cu, g);
      auto grow = g_hist.append();
      std::copy(g.begin(), g.end(), grow.begin());
      if (n + 1 < s.n_t) march.push(g, sn);
    }
    FieldHistory diff = next;
    for (std::size_t n = 0; n < s.n_t; ++n) {
      for (std::size_t i = 0; i < s.n_r; ++i) diff(n, i) -= cur(n, i);
    }
    const double dk = x_norm(diff, wp, s.n_t - 1);
    const double scale = x_norm(next, wp, s.n_t - 1);
    if (!res.differences.empty() && res.differences.back() > 0.0) {
      res.ratios.push_back(dk / res.differences.back());
      if (res.ratios.back() > 0.6) res.contraction_failed = true;
    }
    res.differences.push_back(dk);
    cur = std::move(next);
    res.iterations = k + 1;
    if (dk <= p.picard_tol * scale || dk == 0.0) {
      res.converged = true;
      break;
    }
  }

  SolutionHistory& out = res.solution;
  out.params = p;
  out.u = cur;
  out.g = g_hist;
  for (std::size_t n = 0; n < s.n_t; ++n) {
    out.times.push_back(static_cast<double>(n) * s.h);
    double sup = 0.0;
    for (double v : cur.row(n)) sup = std::max(sup, std::abs(v));
    out.sup_u.push_back(sup);
  }
  return res;
}

FieldHistory liouville(const FieldHistory& u) {
  FieldHistory v(u.h(), u.t0(), u.n_r());
  v.reserve(u.slices());
  for (std::size_t n = 0; n < u.slices(); ++n) {
    const double f = 1.0 + u.time(n);
    auto row = v.append();
    const auto src = u.row(n);
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = src[i] / f;
  }
  return v;
}

FieldHistory inverse_liouville(const FieldHistory& v) {
  FieldHistory u(v.h(), v.t0(), v.n_r());
  u.reserve(v.slices());
  for (std::size_t n = 0; n < v.slices(); ++n) {
    const double f = 1.0 + v.time(n);
    auto row = u.append();
    const auto src = v.row(n);
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = src[i] * f;
  }
  return u;
}

std::vector<double> dissipation_series(const FieldHistory& v) {
  std::vector<double> out(v.slices());
  for (std::size_t n = 0; n < v.slices(); ++n) {
    const double t = v.time(n);
    double best = 0.0;
    const auto row = v.row(n);
    for (std::size_t i = 0; i < row.size(); ++i) {
      best = std::max(best, (1.0 + t + v.r(i)) * std::abs(row[i]));
    }
    out[n] = (1.0 + t) * best;
  }
  return out;
}

ScatteringSeries scattering_check(const SolutionHistory& s, double t_star) {
  if (s.blew_up) throw DomainError("scattering_check: the run blew up");
  if (s.g.slices() == 0 || s.g.slices() != s.u.slices()) {
    throw DomainError("scattering_check needs the stored source history");
  }
  const std::size_t N = s.g.slices() - 1;
  const double h = s.g.h();
  const std::size_t n_r = s.g.n_r();
  const double T = s.g.time(N);
  const double R = s.params.R;

  std::vector<double> gabs(n_r);
  for (std::size_t i = 0; i < n_r; ++i) gabs[i] = std::abs(s.g(N, i));
  const auto qabs = flux_prefix(gabs, h);
  const auto Q = [&](std::size_t k) { return k < n_r ? qabs[k] : qabs.back(); };

  ScatteringSeries out;
  ReverseDuhamelMarch rev(h, s.g.t0(), n_r, N);
  for (std::size_t step = 0; step <= N; ++step) {
    const std::size_t n = rev.current();
    const double t = s.g.time(n);
    if (t < t_star - 1e-12) break;
    const std::size_t k = N - n;
    double trunc = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < n_r; ++i) {
      const double r = static_cast<double>(i) * h;
      if (r > t + R + 1e-12) break;
      const double weight = 1.0 + t + r;
      trunc = std::max(trunc, weight * std::abs(rev.value(i)));
      // outgoing transport of the last source slice with r G conserved
      const double w = i == 0 ? static_cast<double>(k) * h * (k < n_r ? gabs[k] : 0.0)
                              : (Q(k + i) - Q(k > i ? k - i : 0)) / (2.0 * r);
      tail = std::max(tail, weight * w / (1.0 + T));
    }
    out.times.push_back(t);
    out.truncated.push_back(trunc);
    out.tail.push_back(tail);
    out.total.push_back(trunc + tail);
    rev.push(s.g.row(n));
  }
  std::reverse(out.times.begin(), out.times.end());
  std::reverse(out.truncated.begin(), out.truncated.end());
  std::reverse(out.tail.begin(), out.tail.end());
  std::reverse(out.total.begin(), out.total.end());
  out.decreasing = true;
  for (std::size_t j = 1; j < out.total.size(); ++j) {
    if (out.total[j] > out.total[j - 1] * (1.0 + 1e-12)) out.decreasing = false;
  }
  if (!out.total.empty() && out.total.front() > 0.0) {
    out.final_over_initial = out.total.back() / out.total.front();
  }
  return out;
}

double scale_symmetry_check(const Params& p, const DataSpec& spec, double sigma) {
  if (!(sigma >= 0.5 && sigma <= 2.0)) throw DomainError("sigma must lie in [1/2, 2]");
  Params base = p;
  base.R = spec.R;
  base.keep_history = true;
  const Grid grid = base.grid();
  const InitialData d = make_data(spec, base.h, grid.n_r());
  const SolutionHistory a = solve_march(base, d);

  // u_sigma(x, t) = c u(sigma x, sigma (1 + t) - 1), c = sigma^((3 - gamma)/2)
  const double c = std::pow(sigma, 0.5 * (3.0 - p.gamma));
  Params scaled = base;
  scaled.h = base.h / sigma;
  scaled.R = spec.R / sigma;
  scaled.t_max = base.t_max / sigma;
  if (scaled.R < 1.0) throw DomainError("scale check: rescaled support radius below 1");
  std::vector<double> u0(grid.n_r()), u1(grid.n_r());
  for (std::size_t i = 0; i < grid.n_r(); ++i) {
    u0[i] = c * d.v0[i];
    u1[i] = c * sigma * (d.v0[i] + d.v1[i]);
  }
  const UData ud{RadialProfile(scaled.h, u0, scaled.R), RadialProfile(scaled.h, u1, scaled.R),
                 1.0 / sigma - 1.0};
  const SolutionHistory b = solve_march(scaled, ud);
  if (b.u.slices() != a.u.slices()) throw DomainError("scale check: grids do not correspond");

  double worst = 0.0;
  for (std::size_t n = 0; n < a.u.slices(); ++n) {
    const double f = 1.0 + b.u.time(n);
    for (std::size_t i = 0; i < grid.n_r(); ++i) {
      worst = std::max(worst, std::abs(c * a.u(n, i) / f - b.u(n, i) / f));
    }
  }
  return worst;
}

}  // namespace hartree
