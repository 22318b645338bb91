#include "hartree/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hartree/blowup.hpp"
#include "hartree/estimates.hpp"
#include "hartree/lifespan.hpp"
#include "hartree/norms.hpp"
#include "hartree/oracles.hpp"
#include "hartree/potential.hpp"
#include "hartree/wave_ops.hpp"

namespace hartree {

namespace {

using json = nlohmann::ordered_json;
constexpr double kPi = std::numbers::pi;
constexpr const char* kCsvVersion = "# hartree_lab results v1";

const std::set<std::string> kKnownKeys = {
    "description", "profiles", "gamma_list", "mc_samples", "closed_tol", "sigma_tol",
    "samples", "r_limit", "tolerance", "h_list", "min_order", "lemma_samples",
    "linfty_samples", "linfty_h", "bilinear_gammas", "bilinear_T_over_R", "bilinear_h",
    "bilinear_profiles", "log_case_R", "trilinear_gammas", "trilinear_T_over_R",
    "trilinear_h", "identity_gamma", "identity_epsilon", "identity_h", "identity_t_max",
    "identity_tol", "picard_T", "picard_M", "ratio_limit", "match_tol", "sigma_list",
    "tolerance_h2", "window_from", "xnorm_ratio_limit", "dissipation_ratio_limit", "t_star",
    "scattering_limit", "nonlinear", "t_cap", "levels", "threshold_window", "delta",
    "thresholds", "blowup_threshold"};

const std::set<std::string> kSuites = {"convolution", "duhamel", "backend",
                                       "inequalities", "contraction", "symmetry"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// short form for labels
std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(trim(item)));
  if (out.empty()) throw ConfigError("empty list: '" + text + "'");
  return out;
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] > v[k - 1])) return false;
  return true;
}

// Artifacts of one run.
class Csv {
 public:
  explicit Csv(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(fmt(v));
    rows_.push_back(std::move(cells));
  }
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
  std::string text(const std::string& tag) const {
    std::string s = std::string(kCsvVersion) + " " + tag + "\n";
    for (std::size_t k = 0; k < columns_.size(); ++k) s += (k ? "," : "") + columns_[k];
    s += "\n";
    for (const auto& r : rows_) {
      for (std::size_t k = 0; k < r.size(); ++k) s += (k ? "," : "") + r[k];
      s += "\n";
    }
    return s;
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

struct Context {
  explicit Context(const RunConfig& c) : cfg(c) {}
  const RunConfig& cfg;
  json results = json::object();
  std::vector<Invariant> invariants;
  Csv csv{{}};

  void check(std::string name, bool passed, double value, double limit, std::string detail) {
    invariants.push_back({std::move(name), passed, value, limit, std::move(detail)});
  }
};

json report_json(const EstimateReport& r) {
  json j;
  j["name"] = r.name;
  j["samples"] = r.samples;
  j["max_ratio"] = r.max_ratio;
  j["violations"] = r.violations;
  j["empirical_constant"] = r.empirical_constant;
  for (const auto& [k, v] : r.extra) j[k] = v;
  return j;
}

// Per-slice diagnostics of a marching run.
struct SliceRow {
  double t, x_norm, dissipation, F, sup_u;
};

struct SliceStats {
  std::vector<SliceRow> rows;
  MassSeries mass;
  double min_u = 0.0;
};

SliceObserver stats_observer(SliceStats& st, const Params& p) {
  auto mobs = mass_observer(st.mass, p.gamma, p.h, p.R);
  const WeightParams wp{p.gamma, p.R};
  double running = 0.0;
  return [&st, mobs, wp, h = p.h, R = p.R, running](std::size_t n, double t,
                                                     std::span<const double> u,
                                                     std::span<const double> g) mutable {
    mobs(n, t, u, g);
    double xs = 0.0, ds = 0.0, sup = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double r = static_cast<double>(i) * h;
      if (r > t + R + 1e-12) break;
      const double a = std::abs(u[i]);
      xs = std::max(xs, x_weight(r, t, wp) * a);
      // (1+t) sup (1+t+r)|v| with v = u / (1+t)
      ds = std::max(ds, (1.0 + t + r) * a);
      sup = std::max(sup, a);
      st.min_u = std::min(st.min_u, u[i]);
    }
    running = std::max(running, xs);
    st.rows.push_back({t, running, ds, st.mass.F.back(), sup});
  };
}

std::vector<std::string> slice_columns() { return {"t", "x_norm", "dissipation", "F", "sup_u"}; }

json crossings_json(const SolutionHistory& s) {
  json c = json::array();
  for (const auto& [level, t] : s.crossings) c.push_back({{"threshold", level}, {"t", t}});
  return c;
}

double crossing_gap(const SolutionHistory& s) {
  if (s.crossings.size() < 2) return std::numeric_limits<double>::infinity();
  double lo = s.crossings.front().second, hi = lo;
  for (const auto& c : s.crossings) {
    lo = std::min(lo, c.second);
    hi = std::max(hi, c.second);
  }
  return hi - lo;
}

// Ratio max/min of a positive series over t >= from.
double window_ratio(const std::vector<SliceRow>& rows, double from, double SliceRow::*field) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : rows) {
    if (r.t < from - 1e-12) continue;
    lo = std::min(lo, r.*field);
    hi = std::max(hi, r.*field);
  }
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------- solve

void run_solve(Context& cx) {
  const RunConfig& cfg = cx.cfg;
  Params p = cfg.params();
  const bool scattering = cfg.has("t_star");
  p.keep_history = scattering;
  const DataSpec spec = cfg.data();
  SliceStats st;
  const auto s = solve_march(p, make_data(spec, p.h, p.grid().n_r()), stats_observer(st, p));

  cx.csv = Csv(slice_columns());
  double sup_all = 0.0;
  for (const auto& r : st.rows) {
    cx.csv.row({r.t, r.x_norm, r.dissipation, r.F, r.sup_u});
    sup_all = std::max(sup_all, r.sup_u);
  }
  auto& res = cx.results;
  res["slices"] = st.rows.size();
  res["blew_up"] = s.blew_up;
  res["t_numeric"] = s.t_numeric ? json(*s.t_numeric) : json(nullptr);
  res["crossings"] = crossings_json(s);
  res["data_norm"] = data_norm(spec);
  res["data_mass"] = data_mass(spec);
  res["x_norm_final"] = st.rows.empty() ? 0.0 : st.rows.back().x_norm;
  res["sup_u_max"] = sup_all;

  if (spec.family == DataFamily::bump_v1_only && spec.epsilon >= 0.0) {
    cx.check("positivity", st.min_u >= -1e-12 * sup_all, st.min_u, -1e-12 * sup_all,
             "min u over all accepted nodes");
  }
  if (cfg.has("window_from")) {
    const double from = cfg.num("window_from", 0.0);
    const double xr = window_ratio(st.rows, from, &SliceRow::x_norm);
    const double xl = cfg.num("xnorm_ratio_limit", 10.0);
    res["x_norm_window_ratio"] = xr;
    cx.check("x_norm_bounded", xr < xl, xr, xl, "max/min of the running X norm for t >= " + fmt(from));
    const double dr = window_ratio(st.rows, from, &SliceRow::dissipation);
    const double dl = cfg.num("dissipation_ratio_limit", 10.0);
    res["dissipation_window_ratio"] = dr;
    cx.check("dissipation_bounded", dr < dl, dr, dl,
             "max/min of (1+t) sup (1+t+r)|v| for t >= " + fmt(from));
  }
  if (scattering) {
    const double t_star = cfg.num("t_star", 0.0);
    const double limit = cfg.num("scattering_limit", 0.01);
    if (s.blew_up) {
      cx.check("scattering_decreasing", false, 0.0, 0.0, "run blew up");
      cx.check("scattering_final_ratio", false, 0.0, limit, "run blew up");
    } else {
      const auto sc = scattering_check(s, t_star);
      json series = json::array();
      for (std::size_t k = 0; k < sc.times.size(); k += std::max<std::size_t>(1, sc.times.size() / 64))
        series.push_back({sc.times[k], sc.truncated[k], sc.tail[k], sc.total[k]});
      res["scattering"] = {{"t_star", t_star},
                           {"initial", sc.total.empty() ? 0.0 : sc.total.front()},
                           {"final", sc.total.empty() ? 0.0 : sc.total.back()},
                           {"final_over_initial", sc.final_over_initial},
                           {"decreasing", sc.decreasing},
                           {"series_t_truncated_tail_total", series}};
      cx.check("scattering_decreasing", sc.decreasing, sc.decreasing ? 1.0 : 0.0, 1.0,
               "sup (1+t+r)|u - u+| non-increasing on [t_star, t_max]");
      cx.check("scattering_final_ratio", sc.final_over_initial < limit, sc.final_over_initial,
               limit, "final value over value at t_star");
    }
  }
}

// ---------------------------------------------------------------- blowup

void run_blowup(Context& cx) {
  const RunConfig& cfg = cx.cfg;
  std::vector<std::string> cols{"epsilon"};
  for (auto& c : slice_columns()) cols.push_back(c);
  cx.csv = Csv(cols);
  json runs = json::array();
  std::vector<double> times;
  bool all_finite = true;
  const double window = cfg.num("threshold_window", 2.0);

  for (double eps : cfg.epsilon_list) {
    Params p = cfg.params();
    p.epsilon = eps;
    p.t_max = cfg.num("t_cap", 1e5);
    p.keep_history = false;
    const DataSpec spec{cfg.family, eps, cfg.R};
    SliceStats st;
    const auto s = solve_march(p, make_data(spec, p.h, p.grid().n_r()), stats_observer(st, p));
    st.mass.finish(p.h);
    for (const auto& r : st.rows) cx.csv.row({eps, r.t, r.x_norm, r.dissipation, r.F, r.sup_u});

    json run;
    run["epsilon"] = eps;
    run["blew_up"] = s.blew_up;
    run["t_numeric"] = s.t_numeric ? json(*s.t_numeric) : json(nullptr);
    run["crossings"] = crossings_json(s);
    const std::string tag = "eps=" + short_num(eps);
    if (!s.blew_up) {
      all_finite = false;
      cx.check("finite_lifespan " + tag, false, p.t_max, p.t_max, "no blow-up before t_cap");
      runs.push_back(run);
      continue;
    }
    times.push_back(*s.t_numeric);
    const double gap = crossing_gap(s);
    run["threshold_gap"] = gap;
    cx.check("threshold_stability " + tag, gap <= window * p.h, gap, window * p.h,
             "spread of the threshold crossing times");

    // envelope from the simulated F, F' at t_gamma
    const double tg = t_gamma(p.gamma);
    std::size_t k0 = 0;
    while (k0 < st.mass.t.size() && st.mass.t[k0] < tg - 1e-12) ++k0;
    if (k0 + 2 >= st.mass.t.size()) {
      cx.check("envelope " + tag, false, 0.0, 0.0, "blow-up before t_gamma");
    } else {
      const std::vector<double> grid(st.mass.t.begin() + static_cast<std::ptrdiff_t>(k0),
                                     st.mass.t.end());
      const double C0 = data_mass(spec) / eps;
      const auto env =
          ode_envelope(eps, C0, p.gamma, st.mass.F[k0], st.mass.dF[k0], grid);
      const auto rep = envelope_report(st.mass, env);
      run["envelope"] = report_json(rep);
      run["envelope"]["t2"] = env.t2;
      run["envelope"]["C0"] = C0;
      cx.check("envelope " + tag, rep.passed(), static_cast<double>(rep.violations), 0.0,
               "slices where F falls below the comparison solution");
    }
    runs.push_back(run);
  }
  cx.results["runs"] = runs;
  bool decreasing = all_finite;
  for (std::size_t k = 1; k < times.size(); ++k) decreasing = decreasing && times[k] < times[k - 1];
  cx.check("lifespan_decreasing", decreasing, decreasing ? 1.0 : 0.0, 1.0,
           "t_numeric strictly decreasing in epsilon");
}

// ---------------------------------------------------------------- sweep

void run_sweep(Context& cx) {
  const RunConfig& cfg = cx.cfg;
  Params base = cfg.params();
  LifespanOptions opt;
  opt.h = base.h;
  opt.levels = static_cast<std::size_t>(cfg.num("levels", 2));
  opt.t_cap = cfg.num("t_cap", opt.t_cap);
  opt.threshold_window = cfg.num("threshold_window", opt.threshold_window);
  const auto sweep = lifespan_sweep(base, cfg.family, cfg.epsilon_list, opt);

  cx.csv = Csv({"epsilon", "t_numeric", "h", "threshold", "censored", "threshold_gap"});
  std::vector<std::pair<double, double>> pairs;
  json points = json::array();
  for (const auto& m : sweep.points) {
    const double t = m.censored ? opt.t_cap : m.t_richardson;
    const double hf = m.h_levels.empty() ? opt.h : m.h_levels.back();
    cx.csv.row({m.epsilon, t, hf, base.blowup_threshold, m.censored ? 1.0 : 0.0, m.threshold_gap});
    json j;
    j["epsilon"] = m.epsilon;
    j["censored"] = m.censored;
    j["t_levels"] = m.t_levels;
    j["h_levels"] = m.h_levels;
    j["t_richardson"] = m.t_richardson;
    j["threshold_gap"] = m.threshold_gap;
    j["threshold_ok"] = m.threshold_ok;
    j["refinement_ok"] = m.refinement_ok;
    points.push_back(j);
    if (m.censored) continue;
    pairs.emplace_back(m.epsilon, m.t_richardson);
    const std::string tag = "eps=" + short_num(m.epsilon);
    cx.check("threshold_stability " + tag, m.threshold_ok, m.threshold_gap,
             opt.threshold_window * hf, "spread of the threshold crossings on the finest grid");
    if (opt.levels >= 3) {
      const auto& tl = m.t_levels;
      const double last = std::abs(tl[tl.size() - 1] - tl[tl.size() - 2]);
      const double prev = std::abs(tl[tl.size() - 2] - tl[tl.size() - 3]);
      cx.check("refinement_stability " + tag, m.refinement_ok, last, prev,
               "last refinement step against the previous one");
    }
  }
  auto& res = cx.results;
  res["points"] = points;
  res["censored"] = sweep.censored;
  cx.check("lifespan_decreasing", sweep.monotone, sweep.monotone ? 1.0 : 0.0, 1.0,
           "uncensored t_numeric strictly decreasing in epsilon");
  if (pairs.size() < 4) {
    cx.check("slope", false, 0.0, 0.0, "fewer than four uncensored points");
    return;
  }
  const auto fit = fit_slope(pairs, base.gamma, cfg.num("delta", 0.1));
  res["fit"] = {{"slope", fit.slope},
                {"slope_stderr", fit.slope_stderr},
                {"theoretical", fit.theoretical},
                {"theoretical_delta", fit.theoretical_delta},
                {"intercept", fit.intercept},
                {"passed", fit.passed},
                {"lower_bound_shape_ok", fit.lower_bound_shape_ok}};
  cx.check("slope", fit.passed, fit.slope, fit.theoretical,
           "|slope - 2/gamma| <= 0.25 |2/gamma|");
}

// ---------------------------------------------------------------- verify

void verify_convolution(Context& cx) {
  const RunConfig& cfg = cx.cfg;
  const double h = cfg.params().h;
  const auto profiles = static_cast<std::size_t>(cfg.num("profiles", 50));
  const auto samples = static_cast<std::size_t>(cfg.num("mc_samples", 200000));
  const double sigma_tol = cfg.num("sigma_tol", 3.0);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  cx.csv = Csv({"gamma", "profile", "R", "r", "convolve_power", "mc_mean", "mc_stderr", "z"});
  std::size_t violations = 0, total = 0;
  double worst_z = 0.0;
  for (double gamma : cfg.list("gamma_list", {-0.4, 0.0, 0.5, 1.0, 2.0, 2.5})) {
    for (std::size_t k = 0; k < profiles; ++k) {
      const double Rp = 1.0 + U(rng);
      const std::size_t n = static_cast<std::size_t>(std::ceil(Rp / h)) + 1;
      const auto w = oracle::random_profile(h, n, Rp, rng);
      const double r = 2.0 * Rp * U(rng);
      const double value = convolve_power(w, gamma, r);
      const auto mc = oracle::convolution_mc(w, gamma, r, samples, rng);
      const double z = std::abs(value - mc.mean) / mc.stderr_;
      cx.csv.row({gamma, static_cast<double>(k), Rp, r, value, mc.mean, mc.stderr_, z});
      worst_z = std::max(worst_z, z);
      violations += z > sigma_tol;
      ++total;
    }
  }
  cx.results["monte_carlo"] = {{"comparisons", total},
                               {"samples_per_estimate", samples},
                               {"max_z", worst_z},
                               {"violations", violations}};
  cx.check("monte_carlo_agreement", violations == 0, worst_z, sigma_tol,
           std::to_string(violations) + " of " + std::to_string(total) +
               " comparisons beyond the tolerance in standard errors");

  // indicator of the unit ball
  const std::size_t n = cells_in(1.0, h) + 1;
  const RadialProfile ind(h, std::vector<double>(n, 1.0), 1.0);
  struct Closed {
    const char* name;
    double gamma, r, exact;
  };
  std::vector<Closed> forms;
  for (double r : {0.0, 0.5, 2.0}) forms.push_back({"gamma0_mass", 0.0, r, 4.0 * kPi / 3.0});
  for (double r : {0.0, 0.3, 0.7}) forms.push_back({"gamma1_interior", 1.0, r, 2.0 * kPi * (1.0 - r * r / 3.0)});
  for (double r : {1.5, 3.0}) forms.push_back({"gamma1_newton_exterior", 1.0, r, 4.0 * kPi / (3.0 * r)});
  const double tol = cfg.num("closed_tol", 1e-6);
  json closed = json::array();
  double worst = 0.0;
  for (const auto& f : forms) {
    const double v = convolve_power(ind, f.gamma, f.r);
    const double rel = std::abs(v - f.exact) / std::abs(f.exact);
    worst = std::max(worst, rel);
    closed.push_back({{"form", f.name}, {"r", f.r}, {"value", v}, {"exact", f.exact}, {"relative_error", rel}});
  }
  cx.results["closed_forms"] = closed;
  cx.check("closed_forms", worst <= tol, worst, tol, "relative error on the unit-ball indicator");
}

void verify_duhamel(Context& cx) {
  const RunConfig& cfg = cx.cfg;
  const double h = cfg.params().h;
  const double t_max = cfg.t_max;
  const double r_lim = cfg.num("r_limit", 5.0);
  const auto samples = static_cast<std::size_t>(cfg.num("samples", 100));
  const double tol = cfg.num("tolerance", 1e-8);
  const std::size_t n_t = cells_in(t_max, h);
  const std::size_t n_r = cells_in(r_lim + t_max, h) + 2;

  SourceHistory hist(h, 0.0, n_r);
  for (std::size_t m = 0; m <= n_t; ++m) hist.push(std::vector<double>(n_r, 1.0));
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  struct Sample {
    double r;
    std::size_t n, node;
  };
  std::vector<Sample> pts;
  for (std::size_t k = 0; k < samples; ++k) {
    const double r = r_lim * U(rng);
    const auto n = 1 + static_cast<std::size_t>(U(rng) * static_cast<double>(n_t));
    pts.push_back({r, std::min(n, n_t), static_cast<std::size_t>(std::lround(r / h))});
  }
  std::vector<double> march_value(pts.size());
  DuhamelMarch march(h, 0.0, n_r, n_t + 1);
  const std::vector<double> ones(n_r, 1.0);
  for (std::size_t n = 1; n <= n_t; ++n) {
    march.push(ones);
    for (std::size_t k = 0; k < pts.size(); ++k)
      if (pts[k].n == n) march_value[k] = march.value(pts[k].node);
  }

  cx.csv = Csv({"r", "t", "exact", "direct", "march_r", "march"});
  double worst_direct = 0.0, worst_march = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double t = static_cast<double>(pts[k].n) * h;
    const double exact = t - std::log1p(t);
    const double d = duhamel(hist, pts[k].r, pts[k].n);
    worst_direct = std::max(worst_direct, std::abs(d - exact));
    worst_march = std::max(worst_march, std::abs(march_value[k] - exact));
    cx.csv.row({pts[k].r, t, exact, d, static_cast<double>(pts[k].node) * h, march_value[k]});
  }
  cx.results["max_error_direct"] = worst_direct;
  cx.results["max_error_march"] = worst_march;
  cx.check("duhamel_closed_form", worst_direct <= tol, worst_direct, tol,
           "|L(1) - (t - ln(1+t))| at random (r, t)");
  cx.check("duhamel_march_closed_form", worst_march <= tol, worst_march, tol,
           "same through the marching form at the nearest node");
}

void verify_backend(Context& cx) {
  const RunConfig& cfg = cx.cfg;
  const auto hs = cfg.list("h_list", {cfg.R / 32, cfg.R / 64, cfg.R / 128});
  const double min_order = cfg.num("min_order", 1.9);
  cx.csv = Csv({"h", "sup_difference", "order"});
  std::vector<double> diffs, orders;
  for (double h : hs) {
    Params p = cfg.params();
    p.h = h;
    p.keep_history = true;
    const auto d = make_data(cfg.data(), h, p.grid().n_r());
    const auto a = solve_march(p, d);
    const auto b = solve_dalembert(p, d);
    double w = 0.0;
    const auto& ua = a.u.data();
    const auto& ub = b.u.data();
    for (std::size_t k = 0; k < std::min(ua.size(), ub.size()); ++k) w = std::max(w, std::abs(ua[k] - ub[k]));
    const double order = diffs.empty() ? 0.0 : std::log(diffs.back() / w) / std::log(hs[diffs.size() - 1] / h);
    if (!diffs.empty()) orders.push_back(order);
    diffs.push_back(w);
    cx.csv.row({h, w, order});
  }
  cx.results["h"] = hs;
  cx.results["sup_difference"] = diffs;
  cx.results["orders"] = orders;
  const double worst = orders.empty() ? 0.0 : *std::min_element(orders.begin(), orders.end());
  cx.check("backend_order", !orders.empty() && worst >= min_order, worst, min_order,
           "smallest observed order of the march/leapfrog difference");
}

void verify_inequalities(Context& cx) {
  const RunConfig& cfg = cx.cfg;
  auto& res = cx.results;
  cx.csv = Csv({"check", "samples", "max_ratio", "violations"});
  const auto add = [&](const EstimateReport& r, const std::string& label) {
    res["reports"].push_back(report_json(r));
    res["reports"].back()["label"] = label;
    cx.csv.row({label, std::to_string(r.samples), fmt(r.max_ratio), std::to_string(r.violations)});
    cx.check(label, r.passed(), static_cast<double>(r.violations), 0.0, "violations");
  };
  res["reports"] = json::array();

  add(verify_lemma_integrals(static_cast<std::size_t>(cfg.num("lemma_samples", 1e4)), cfg.seed),
      "lemma_integrals");
  add(verify_linfty(static_cast<std::size_t>(cfg.num("linfty_samples", 1e3)), cfg.seed,
                    cfg.num("linfty_h", 1.0 / 32)),
      "linfty_bound");

  BilinearOptions bo;
  bo.T_over_R = cfg.num("bilinear_T_over_R", 50.0);
  bo.random_profiles = static_cast<std::size_t>(cfg.num("bilinear_profiles", 100));
  bo.seed = cfg.seed;
  const double bh = cfg.num("bilinear_h", 1.0 / 16);
  for (double g : cfg.list("bilinear_gammas", {-0.4, 1.0, 2.0, 2.5})) {
    const double R = g == 2.0 ? cfg.num("log_case_R", 2.0) : cfg.R;
    add(verify_bilinear(g, R, bh * R, bo), "bilinear gamma=" + short_num(g));
  }

  const double tT = cfg.num("trilinear_T_over_R", 2048.0);
  const double th = cfg.num("trilinear_h", 1.0 / 4);
  for (double g : cfg.list("trilinear_gammas", {-0.4, 1.0})) {
    const auto tr = verify_trilinear(g, cfg.R, tT * cfg.R, th * cfg.R);
    const std::string label = "trilinear gamma=" + short_num(g);
    add(tr.report, label);
    res["reports"].back()["growth_slope"] = tr.growth_slope;
    res["reports"].back()["T"] = tr.T;
    res["reports"].back()["norm"] = tr.norm;
    res["reports"].back()["bound"] = tr.bound;
    const double target = g < 0.0 ? -g : 0.0;
    cx.check(label + " growth_shape", tr.shape_ok, tr.growth_slope, target,
             "log-log slope of the X norm over the last doubling of T");
  }

  // mass identity and the lower-bound chain on a blowing-up run
  Params p = cfg.params();
  p.gamma = cfg.num("identity_gamma", -0.4);
  p.epsilon = cfg.num("identity_epsilon", 4.0);
  p.h = cfg.num("identity_h", cfg.R / 128);
  p.t_max = cfg.num("identity_t_max", 200.0);
  p.keep_history = false;
  const DataSpec spec{DataFamily::bump_v1_only, p.epsilon, cfg.R};
  MassSeries m;
  const auto s = solve_march(p, make_data(spec, p.h, p.grid().n_r()),
                             mass_observer(m, p.gamma, p.h, p.R));
  m.finish(p.h);
  res["identity_run"] = {{"gamma", p.gamma},
                         {"epsilon", p.epsilon},
                         {"h", p.h},
                         {"blew_up", s.blew_up},
                         {"t_numeric", s.t_numeric ? json(*s.t_numeric) : json(nullptr)}};
  cx.check("identity_run_blows_up", s.blew_up, s.t_numeric.value_or(p.t_max), p.t_max,
           "blow-up before identity_t_max");
  IdentityOptions io;
  io.rel_tol = cfg.num("identity_tol", 1e-3);
  io.t_from = t_gamma(p.gamma);
  add(identity_report(m, io), "mass_identity");
  add(frame_report(m, p.gamma), "frame");
  add(frame2_report(m, p.gamma), "frame2");
}

void verify_contraction(Context& cx) {
  const RunConfig& cfg = cx.cfg;
  const Params p = cfg.params();
  const DataSpec spec = cfg.data();
  const double M = cfg.num("picard_M", 0.34);
  const double T = std::min(cfg.num("picard_T", 0.9), picard_time_bound(p.gamma, p.R, M));
  const auto res = picard_local(p, spec, T, M);
  Params q = p;
  q.t_max = T;
  q.keep_history = true;
  const auto direct = solve_march(q, make_data(spec, q.h, q.grid().n_r()));
  double worst = 0.0;
  const auto& a = direct.u.data();
  const auto& b = res.solution.u.data();
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));

  cx.csv = Csv({"iteration", "difference", "ratio"});
  for (std::size_t k = 0; k < res.differences.size(); ++k)
    cx.csv.row({static_cast<double>(k + 1), res.differences[k], k == 0 ? 0.0 : res.ratios[k - 1]});
  const double max_ratio = res.ratios.empty() ? 0.0 : *std::max_element(res.ratios.begin(), res.ratios.end());
  auto& out = cx.results;
  out["T"] = res.T;
  out["M"] = res.M;
  out["time_bound"] = res.time_bound;
  out["c0_linear"] = res.c0_linear;
  out["data_size"] = res.data_size;
  out["iterations"] = res.iterations;
  out["converged"] = res.converged;
  out["ratios"] = res.ratios;
  out["max_ratio"] = max_ratio;
  out["fixed_point_vs_march"] = worst;
  const double limit = cfg.num("ratio_limit", 0.55);
  const double tol = cfg.num("match_tol", 1e-6);
  cx.check("smallness_condition", res.precondition_ok, res.M, 6.0 * n_gamma(4.0, p.gamma) * res.c0_linear * res.data_size,
           "M > 6 N_gamma(4) C0 |data| and T within the time bound");
  cx.check("picard_converged", res.converged, static_cast<double>(res.iterations),
           static_cast<double>(p.picard_max_iter), "iterations");
  cx.check("contraction_ratio", !res.ratios.empty() && max_ratio <= limit, max_ratio, limit,
           "largest successive difference ratio");
  cx.check("fixed_point_matches_march", worst <= tol, worst, tol, "sup |u_picard - u_march|");
}

void verify_symmetry(Context& cx) {
  const RunConfig& cfg = cx.cfg;
  const Params p = cfg.params();
  const double tol = cfg.num("tolerance_h2", 10.0) * p.h * p.h;
  cx.csv = Csv({"sigma", "mismatch"});
  json all = json::array();
  for (double sigma : cfg.list("sigma_list", {0.5, 2.0})) {
    const double mis = scale_symmetry_check(p, cfg.data(), sigma);
    cx.csv.row({sigma, mis});
    all.push_back({{"sigma", sigma}, {"mismatch", mis}});
    cx.check("scale_symmetry sigma=" + short_num(sigma), mis <= tol, mis, tol, "sup |v_sigma - v'|");
  }
  cx.results["mismatch"] = all;
}

void run_verify(Context& cx) {
  const std::string& s = cx.cfg.suite;
  if (s == "convolution") verify_convolution(cx);
  else if (s == "duhamel") verify_duhamel(cx);
  else if (s == "backend") verify_backend(cx);
  else if (s == "inequalities") verify_inequalities(cx);
  else if (s == "contraction") verify_contraction(cx);
  else verify_symmetry(cx);
}

json config_json(const RunConfig& c) {
  json j;
  j["mode"] = mode_name(c.mode);
  if (c.mode == RunMode::verify) j["suite"] = c.suite;
  j["gamma"] = c.gamma;
  j["R"] = c.R;
  j["epsilon"] = c.epsilon;
  j["epsilon_list"] = c.epsilon_list;
  j["h"] = c.params().h;
  j["t_max"] = c.t_max;
  j["family"] = family_name(c.family);
  j["seed"] = c.seed;
  for (const auto& [k, v] : c.extra) j[k] = v;
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

}  // namespace

RunMode parse_mode(const std::string& name) {
  if (name == "solve") return RunMode::solve;
  if (name == "sweep") return RunMode::sweep;
  if (name == "verify") return RunMode::verify;
  if (name == "blowup") return RunMode::blowup;
  throw ConfigError("unknown mode '" + name + "'");
}

std::string mode_name(RunMode m) {
  switch (m) {
    case RunMode::solve: return "solve";
    case RunMode::sweep: return "sweep";
    case RunMode::verify: return "verify";
    case RunMode::blowup: return "blowup";
  }
  return "?";
}

double parse_number(const std::string& text) {
  const auto slash = text.find('/');
  const auto one = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ConfigError("not a number: '" + text + "'");
    }
    if (used != s.size()) throw ConfigError("not a number: '" + text + "'");
    return v;
  };
  if (slash == std::string::npos) return one(trim(text));
  const double d = one(trim(text.substr(slash + 1)));
  if (d == 0.0) throw ConfigError("zero denominator: '" + text + "'");
  return one(trim(text.substr(0, slash))) / d;
}

double RunConfig::num(const std::string& key, double fallback) const {
  const auto it = extra.find(key);
  return it == extra.end() ? fallback : parse_number(it->second);
}

std::vector<double> RunConfig::list(const std::string& key, std::vector<double> fallback) const {
  const auto it = extra.find(key);
  return it == extra.end() ? fallback : parse_list(it->second);
}

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  bool has_mode = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'");
    try {
      if (key == "mode") c.mode = parse_mode(value), has_mode = true;
      else if (key == "suite") c.suite = value;
      else if (key == "gamma") c.gamma = parse_number(value);
      else if (key == "R") c.R = parse_number(value);
      else if (key == "epsilon") c.epsilon = parse_number(value);
      else if (key == "epsilon_list") c.epsilon_list = parse_list(value);
      else if (key == "h") c.h = parse_number(value);
      else if (key == "t_max") c.t_max = parse_number(value);
      else if (key == "family") c.family = parse_family(value);
      else if (key == "out") c.out = value;
      else if (key == "seed") c.seed = std::stoull(value);
      else if (key == "threads") c.threads = static_cast<unsigned>(std::stoul(value));
      else if (kKnownKeys.count(key)) c.extra[key] = value;
      else throw ConfigError("unknown key '" + key + "'");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("key '" + key + "': " + e.what());
    }
  }
  if (!has_mode) throw ConfigError("missing key 'mode'");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path.string());
  return parse_config(f);
}

Params RunConfig::params() const {
  Params p;
  p.gamma = gamma;
  p.R = R;
  p.epsilon = epsilon;
  p.h = h > 0.0 ? h : R / 64.0;
  p.t_max = t_max;
  p.nonlinear = num("nonlinear", 1.0) != 0.0;
  p.thresholds = list("thresholds", p.thresholds);
  p.blowup_threshold = num("blowup_threshold", p.blowup_threshold);
  return p;
}

void RunConfig::validate() const {
  if (!(gamma > -0.5 && gamma < 3.0)) throw ConfigError("gamma must lie in (-1/2, 3)");
  if (!(R >= 1.0)) throw ConfigError("R must be >= 1");
  if (h < 0.0) throw ConfigError("h must be positive");
  if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
  for (const auto& key : {"mc_samples", "samples", "profiles", "lemma_samples", "linfty_samples"})
    if (has(key) && !(num(key, 0.0) >= 1.0)) throw ConfigError(std::string(key) + " must be >= 1");
  switch (mode) {
    case RunMode::verify:
      if (!kSuites.count(suite)) throw ConfigError("verify mode needs suite in {convolution, duhamel, backend, inequalities, contraction, symmetry}");
      break;
    case RunMode::sweep:
    case RunMode::blowup:
      if (epsilon_list.empty()) throw ConfigError(mode_name(mode) + " mode needs epsilon_list");
      if (!strictly_increasing(epsilon_list)) throw ConfigError("epsilon_list must be strictly increasing");
      if (!(gamma < 0.0)) throw ConfigError(mode_name(mode) + " mode needs gamma < 0");
      if (mode == RunMode::sweep && epsilon_list.size() < 4) throw ConfigError("sweep needs at least four epsilons");
      break;
    case RunMode::solve:
      if (!has("t_star") && (has("scattering_limit"))) throw ConfigError("scattering_limit needs t_star");
      break;
  }
  if (mode != RunMode::verify && !suite.empty()) throw ConfigError("suite is only used in verify mode");
  try {
    params().validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

const Invariant* RunOutcome::find(const std::string& name) const {
  for (const auto& inv : invariants)
    if (inv.name == name) return &inv;
  return nullptr;
}

RunOutcome run(const RunConfig& config, const std::filesystem::path& out_dir) {
  RunOutcome outcome;
  try {
    config.validate();
  } catch (const ConfigError& e) {
    outcome.status = 2;
    outcome.message = e.what();
    return outcome;
  }
  Context cx(config);
  try {
    switch (config.mode) {
      case RunMode::solve: run_solve(cx); break;
      case RunMode::sweep: run_sweep(cx); break;
      case RunMode::verify: run_verify(cx); break;
      case RunMode::blowup: run_blowup(cx); break;
    }
    outcome.status = 0;
    for (const auto& inv : cx.invariants)
      if (!inv.passed) outcome.status = 1;
  } catch (const NumericalAbort& e) {
    outcome.status = 3;
    outcome.message = std::string("numerical abort at slice ") + std::to_string(e.slice()) + ": " + e.what();
  } catch (const DomainError& e) {
    outcome.status = 2;
    outcome.message = e.what();
    return outcome;
  }
  outcome.invariants = cx.invariants;

  const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path(config.out) : out_dir;
  std::filesystem::create_directories(dir);
  const std::string tag = "mode=" + mode_name(config.mode) + (config.suite.empty() ? "" : " suite=" + config.suite);
  write_file(dir / "results.csv", cx.csv.text(tag));

  json summary;
  summary["format"] = "hartree_lab summary v1";
  summary["config"] = config_json(config);
  summary["results"] = cx.results;
  json inv = json::array();
  std::string ledger;
  for (const auto& i : cx.invariants) {
    inv.push_back({{"name", i.name}, {"passed", i.passed}, {"value", i.value}, {"limit", i.limit}, {"detail", i.detail}});
    ledger += std::string(i.passed ? "PASS" : "FAIL") + "\t" + i.name + "\tvalue=" + fmt(i.value) +
              "\tlimit=" + fmt(i.limit) + "\t" + i.detail + "\n";
  }
  summary["invariants"] = inv;
  summary["status"] = outcome.status;
  if (!outcome.message.empty()) summary["message"] = outcome.message;
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  write_file(dir / "invariants.txt", ledger);
  return outcome;
}

}  // namespace hartree
