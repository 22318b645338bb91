#include "hartree/potential.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "gauss.hpp"

namespace hartree {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogBranchWidth = 1e-9;
constexpr double kSeriesWidth = 1e-3;

std::mutex plan_mutex;

struct Antiderivative {
  double beta;
  bool log_branch;

  double operator()(double x) const {
    if (log_branch) return std::log(x);
    return std::expm1(beta * std::log(x)) / beta;
  }
};

Antiderivative make_h(double gamma) {
  const double beta = 2.0 - gamma;
  return {beta, std::abs(beta) < kLogBranchWidth};
}

// \int u^k ln^m u du evaluated at u (zero at u = 0).
double log_moment(int k, int m, double u) {
  if (u == 0.0) return 0.0;
  const double lu = std::log(u);
  const double kk = k + 1.0;
  double acc = std::pow(u, kk) / kk;  // m = 0
  for (int j = 1; j <= m; ++j) acc = std::pow(u, kk) * std::pow(lu, j) / kk - j / kk * acc;
  return acc;
}

// \int_{u0}^{u1} u^k H(u) du for 0 <= u0 <= u1 and k in {0, 1}.
double power_moment(const Antiderivative& H, int k, double u0, double u1) {
  if (u1 <= u0) return 0.0;
  const double beta = H.log_branch ? 0.0 : H.beta;
  if (H.log_branch || std::abs(beta) < kSeriesWidth) {
    // H = sum_m beta^(m-1) ln^m u / m!
    double acc = 0.0;
    double coef = 1.0;
    for (int m = 1; m <= 8; ++m) {
      coef /= m;
      acc += coef * (log_moment(k, m, u1) - log_moment(k, m, u0));
      if (H.log_branch) break;
      coef *= beta;
    }
    return acc;
  }
  const double e = k + beta + 1.0;
  const double kk = k + 1.0;
  const double lead = (std::pow(u1, e) - std::pow(u0, e)) / (e * beta);
  const double tail = (std::pow(u1, kk) - std::pow(u0, kk)) / (kk * beta);
  return lead - tail;
}

// \int_{u0}^{u1} (A + B u) H(|u|) du, any signs.
double linear_piece(const Antiderivative& H, double A, double B, double u0, double u1) {
  if (u1 <= u0) return 0.0;
  if (u0 >= 0.0) return A * power_moment(H, 0, u0, u1) + B * power_moment(H, 1, u0, u1);
  if (u1 <= 0.0) return A * power_moment(H, 0, -u1, -u0) - B * power_moment(H, 1, -u1, -u0);
  return linear_piece(H, A, B, u0, 0.0) + linear_piece(H, A, B, 0.0, u1);
}

double half_integral(const Antiderivative& H, double h, double c, bool left) {
  const double u0 = left ? c - h : c;
  const double u1 = left ? c : c + h;
  const double A = left ? (h - c) / h : (h + c) / h;
  const double B = left ? 1.0 / h : -1.0 / h;
  const double near = std::min(std::abs(u0), std::abs(u1));
  if (u0 < 0.0 && u1 > 0.0) return linear_piece(H, A, B, u0, u1);
  if (near < 3.0 * h) return linear_piece(H, A, B, u0, u1);
  return detail::integrate(detail::gauss_rule(8), u0, u1,
                           [&](double u) { return (A + B * u) * H(std::abs(u)); });
}

double hat_integral(const Antiderivative& H, double h, double c, HatPart part) {
  switch (part) {
    case HatPart::left:
      return half_integral(H, h, c, true);
    case HatPart::right:
      return half_integral(H, h, c, false);
    case HatPart::full:
    default:
      return half_integral(H, h, c, true) + half_integral(H, h, c, false);
  }
}

// 4 pi \int_0^{J h} rho^(2-gamma) w(rho) drho over the interpolant of w
double axis_value(std::span<const double> w, std::size_t support_node, double h, double gamma) {
  double acc = 0.0;
  for (std::size_t j = 0; j < support_node; ++j) {
    const double a = static_cast<double>(j) * h;
    acc += detail::cell_integral(w[j], (w[j + 1] - w[j]) / h, a, 2.0 - gamma, a, a + h);
  }
  return 4.0 * kPi * acc;
}

std::size_t pow2_at_least(std::size_t n) {
  std::size_t L = 1;
  while (L < n) L <<= 1;
  return L;
}

}  // namespace

void check_gamma(double gamma) {
  if (!(gamma > -0.5 && gamma < 3.0)) throw DomainError("gamma must lie in (-1/2, 3)");
}

PotentialKernel::PotentialKernel(double gamma) : gamma_(gamma), beta_(2.0 - gamma) {
  check_gamma(gamma);
  log_branch_ = std::abs(beta_) < kLogBranchWidth;
}

double PotentialKernel::antiderivative(double x) const {
  return Antiderivative{beta_, log_branch_}(x);
}

double PotentialKernel::operator()(double r, double rho) const {
  if (r < 0.0 || rho < 0.0) throw DomainError("kernel: negative radius");
  if (r == 0.0) return 4.0 * kPi * std::pow(rho, beta_);
  if (rho == 0.0) return 0.0;
  return 2.0 * kPi * rho / r * (antiderivative(r + rho) - antiderivative(std::abs(r - rho)));
}

double hat_kernel_integral(double gamma, double h, double c, HatPart part) {
  check_gamma(gamma);
  return hat_integral(make_h(gamma), h, c, part);
}

double convolve_power(const RadialProfile& w, double gamma, double r) {
  check_gamma(gamma);
  if (r < 0.0) throw DomainError("convolve_power: negative radius");
  const double h = w.h();
  const std::size_t J = w.support_node();
  if (r < 0.5 * h) return axis_value(w.samples(), J, h, gamma);
  const Antiderivative H = make_h(gamma);
  double acc = 0.0;
  for (std::size_t j = 1; j <= J; ++j) {
    const double rho = static_cast<double>(j) * h;
    const double p = rho * w[j];
    if (p == 0.0) continue;
    if (j < J) {
      acc += p * (hat_integral(H, h, r + rho, HatPart::full) -
                  hat_integral(H, h, r - rho, HatPart::full));
    } else {
      acc += p * (hat_integral(H, h, r + rho, HatPart::left) -
                  hat_integral(H, h, r - rho, HatPart::right));
    }
  }
  return 2.0 * kPi * acc / r;
}

struct GridConvolver::FftPlan {
  std::size_t L = 0;
  double* in = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  std::vector<std::complex<double>> plus_hat;
  std::vector<std::complex<double>> minus_hat;

  FftPlan() = default;
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
    if (in) fftw_free(in);
    if (spec) fftw_free(spec);
  }
};

GridConvolver::GridConvolver(double gamma, double h, std::size_t n_max)
    : gamma_(gamma), h_(h), n_max_(n_max) {
  check_gamma(gamma);
  if (!(h > 0.0)) throw DomainError("convolver: spacing must be positive");
  if (n_max < 2) throw DomainError("convolver: need two nodes");
  const Antiderivative H = make_h(gamma);
  const std::size_t n_tab = 4 * n_max + 4;
  k_full_.resize(n_tab);
  k_left_.resize(n_tab);
  k_right_.resize(n_tab);
  for (std::size_t k = 0; k < n_tab; ++k) {
    const double c = static_cast<double>(k) * h;
    k_left_[k] = hat_integral(H, h, c, HatPart::left);
    k_right_[k] = hat_integral(H, h, c, HatPart::right);
    k_full_[k] = k_left_[k] + k_right_[k];
  }
}

GridConvolver::~GridConvolver() = default;

const GridConvolver::FftPlan& GridConvolver::plan(std::size_t L) const {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = plans_.find(L);
  if (it != plans_.end()) return *it->second;
  auto p = std::make_unique<FftPlan>();
  p->L = L;
  p->in = fftw_alloc_real(L);
  p->spec = fftw_alloc_complex(L / 2 + 1);
  // ESTIMATE keeps the chosen algorithm, and so the rounding, identical across runs
  p->forward = fftw_plan_dft_r2c_1d(static_cast<int>(L), p->in, p->spec, FFTW_ESTIMATE);
  p->inverse = fftw_plan_dft_c2r_1d(static_cast<int>(L), p->spec, p->in, FFTW_ESTIMATE);
  const auto transform = [&](auto fill) {
    for (std::size_t k = 0; k < L; ++k) p->in[k] = fill(k);
    fftw_execute(p->forward);
    std::vector<std::complex<double>> out(L / 2 + 1);
    for (std::size_t k = 0; k <= L / 2; ++k) out[k] = {p->spec[k][0], p->spec[k][1]};
    return out;
  };
  p->plus_hat = transform([&](std::size_t k) { return k_full_[k]; });
  p->minus_hat = transform([&](std::size_t k) { return k_full_[std::min(k, L - k)]; });
  auto& ref = *p;
  plans_.emplace(L, std::move(p));
  return ref;
}

void GridConvolver::raw_direct(std::span<const double> p, std::span<double> c) const {
  const std::size_t J = p.size();
  const double* kf = k_full_.data();
  for (std::size_t i = 0; i < c.size(); ++i) {
    double acc = 0.0;
    const std::size_t split = std::min(i + 1, J);
    for (std::size_t j = 0; j < split; ++j) acc += p[j] * (kf[i + j] - kf[i - j]);
    for (std::size_t j = split; j < J; ++j) acc += p[j] * (kf[i + j] - kf[j - i]);
    c[i] = acc;
  }
}

void GridConvolver::raw_fft(std::span<const double> p, std::span<double> c) const {
  const std::size_t L = pow2_at_least(2 * std::max(c.size(), p.size()));
  const FftPlan& fp = plan(L);
  std::lock_guard<std::mutex> lock(plan_mutex);
  std::fill(fp.in, fp.in + L, 0.0);
  std::copy(p.begin(), p.end(), fp.in);
  fftw_execute(fp.forward);
  for (std::size_t k = 0; k <= L / 2; ++k) {
    const std::complex<double> P(fp.spec[k][0], fp.spec[k][1]);
    const std::complex<double> C = std::conj(P) * fp.plus_hat[k] - P * fp.minus_hat[k];
    fp.spec[k][0] = C.real();
    fp.spec[k][1] = C.imag();
  }
  fftw_execute(fp.inverse);
  const double scale = 1.0 / static_cast<double>(L);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = fp.in[i] * scale;
}

void GridConvolver::apply(std::span<const double> w, std::size_t support_node,
                          std::span<double> out, Method method) const {
  const std::size_t I = out.size();
  const std::size_t J = support_node;
  if (I > n_max_ || J >= n_max_) throw DomainError("convolver: profile exceeds the tables");
  if (J >= w.size()) throw DomainError("convolver: support node outside the samples");
  if (I == 0) return;
  std::vector<double> p(J + 1);
  for (std::size_t j = 0; j <= J; ++j) p[j] = static_cast<double>(j) * h_ * w[j];
  std::vector<double> c(I);
  if (method == Method::automatic) method = std::max(I, J + 1) > 384 ? Method::fft : Method::direct;
  if (method == Method::fft) {
    raw_fft(p, c);
  } else {
    raw_direct(p, c);
  }
  if (J >= 1 && p[J] != 0.0) {
    // the last hat only has its left half
    for (std::size_t i = 0; i < I; ++i) {
      const double plus = k_left_[i + J] - k_full_[i + J];
      const double minus = i >= J ? k_right_[i - J] - k_full_[i - J]
                                  : k_left_[J - i] - k_full_[J - i];
      c[i] += p[J] * (plus - minus);
    }
  }
  out[0] = axis_value(w, J, h_, gamma_);
  for (std::size_t i = 1; i < I; ++i) out[i] = 2.0 * kPi * c[i] / (static_cast<double>(i) * h_);
}

std::vector<double> GridConvolver::apply(const RadialProfile& w, Method method) const {
  std::vector<double> out(w.size());
  apply(w.samples(), w.support_node(), out, method);
  return out;
}

}  // namespace hartree
