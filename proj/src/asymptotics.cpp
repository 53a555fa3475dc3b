#include "dtcm/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace dtcm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_no_initial_bosons(const ModelParams& params) {
  params.validate();
  if (params.n_bosons != 0) throw std::domain_error("approximation defined only for N_B = 0");
}

// Antiderivative of c'/(r2 + c^2) in terms of c, for either sign of r2.
double arctan_like(double c, double r2) {
  if (r2 > 0.0) {
    const double r = std::sqrt(r2);
    return std::atan(c / r) / r;
  }
  if (r2 < 0.0) {
    const double rho = std::sqrt(-r2);
    return std::log(std::abs((c - rho) / (c + rho))) / (2.0 * rho);
  }
  return -1.0 / c;
}

}  // namespace

ContinuousCurve::ContinuousCurve(Fn log_shape, Fn log_derivative, int spin_count, Process process)
    : log_shape_(std::move(log_shape)),
      log_derivative_(std::move(log_derivative)),
      spin_count_(spin_count),
      process_(process) {
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(spin_count) + 1);
  for (int nu = 0; nu <= spin_count; ++nu) samples.push_back(log_shape_(nu));
  log_norm_ = log_sum_exp(samples);
  if (!std::isfinite(log_norm_)) throw std::domain_error("ContinuousCurve: normalisation is not finite");
}

double ContinuousCurve::density(double nu) const { return std::exp(log_density(nu)); }

Distribution ContinuousCurve::sample() const {
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(spin_count_) + 1);
  for (int nu = 0; nu <= spin_count_; ++nu) logs.push_back(log_density(nu));
  return Distribution(std::move(logs), process_);
}

int ContinuousCurve::argmax() const {
  int best = 0;
  double best_value = log_shape_(0);
  for (int nu = 1; nu <= spin_count_; ++nu) {
    const double v = log_shape_(nu);
    if (v > best_value) {
      best_value = v;
      best = nu;
    }
  }
  return best;
}

double GaussianSummary::density(double nu) const {
  const double d = nu - mean;
  return std::exp(-d * d / (2.0 * variance)) / std::sqrt(kTwoPi * variance);
}

void require_semiclassical_domain(const ModelParams& params) {
  require_no_initial_bosons(params);
  if (params.g == 0.0) throw std::domain_error("approximation undefined at g = 0 (x = 1)");
}

bool strong_coupling(const ModelParams& params) { return params.g * params.spin_count > 1.0; }

ContinuousCurve forward_continuous(const ModelParams& params) {
  require_semiclassical_domain(params);
  const QParam x = params.x();
  const double xv = x.value();
  const double one_minus_x = x.one_minus_pow(1.0);
  const double drift = 2.0 * one_minus_x / (1.0 + xv);
  const double power = -4.0 * xv / ((1.0 + xv) * x.log());
  const double top = params.spin_count + 0.5;
  auto log_shape = [=](double nu) {
    const double base = x.one_minus_pow(top - nu) + xv;  // 1 + x - x^{2S+1/2-nu}
    if (!(base > 0.0)) return kNegInf;
    return drift * nu + power * std::log(base);
  };
  auto log_derivative = [=](double nu) {
    const double xw = std::exp((top - nu) * x.log());
    const double base = x.one_minus_pow(top - nu) + xv;
    return drift - 4.0 * xv * xw / ((1.0 + xv) * base);
  };
  return ContinuousCurve(log_shape, log_derivative, params.spin_count, Process::forward);
}

double forward_continuous(const ModelParams& params, double nu) { return forward_continuous(params).density(nu); }

double forward_recursion_rhs(QParam x, double f) {
  const double xv = x.value();
  return 2.0 * (2.0 * xv / (x.one_minus_pow(f + 1.0) + xv) - 1.0);
}

GaussianSummary forward_gaussian(const ModelParams& params) {
  require_semiclassical_domain(params);
  const QParam x = params.x();
  GaussianSummary s;
  s.process = Process::forward;
  s.mean = params.spin_count - x.log_one_minus_pow(1.0) / x.log();
  s.variance = -x.value() / (x.one_minus_pow(1.0) * x.log());
  s.outside_support = s.mean < 0.0 || s.mean > params.spin_count;
  return s;
}

ContinuousCurve inverse_continuous(const ModelParams& params) {
  require_semiclassical_domain(params);
  const QParam x = params.x();
  const double lx = x.log();
  const double xv = x.value();
  const double n = params.spin_count;
  auto xp = [lx](double e) { return std::exp(e * lx); };
  // 4 - 4 x^{2S+1} - x^{4S+1}; may be negative at weak coupling and few spins,
  // where the arctan continues to a logarithm.
  const double r2 = 4.0 * x.one_minus_pow(n + 1.0) - xp(2.0 * n + 1.0);
  const double amplitude = 4.0 * (xp(n + 0.5) + 2.0 * xp(n + 1.5) - 2.0 * std::sqrt(xv)) / ((xv + 1.0) * lx);
  const double power = 2.0 / ((1.0 + xv) * lx);
  auto c_of = [=](double nu) { return xp(n + 0.5) - 2.0 * xp(nu + 1.0) - 2.0 * xp(nu) + 2.0 * std::sqrt(xv); };
  // 1 - x^{nu+2S+1/2} + x^{2nu} - 2x^{nu+1/2} + x^{2nu+1}, rearranged to avoid cancellation.
  auto poly = [=](double nu) {
    const double a = x.one_minus_pow(nu + 0.5);
    return a * a + xp(2.0 * nu) * x.one_minus_pow(n + 0.5 - nu);
  };
  auto log_shape = [=](double nu) {
    const double p = poly(nu);
    if (!(p > 0.0)) return kNegInf;
    return -2.0 * nu + amplitude * arctan_like(c_of(nu), r2) + power * std::log(p);
  };
  auto log_derivative = [=](double nu) {
    const double c = c_of(nu);
    const double dc = -2.0 * lx * (xp(nu + 1.0) + xp(nu));
    const double dpoly = lx * (-xp(nu + n + 0.5) + 2.0 * xp(2.0 * nu) - 2.0 * xp(nu + 0.5) + 2.0 * xp(2.0 * nu + 1.0));
    return -2.0 + amplitude * dc / (r2 + c * c) + power * dpoly / poly(nu);
  };
  return ContinuousCurve(log_shape, log_derivative, params.spin_count, Process::inverse);
}

double inverse_continuous(const ModelParams& params, double nu) { return inverse_continuous(params).density(nu); }

double inverse_recursion_ratio(QParam x, int spin_count, double nu) {
  const double d = x.one_minus_pow(nu + 1.0);
  return std::exp((2.0 * nu + 1.0) * x.log()) * x.one_minus_pow(spin_count - nu) / (d * d);
}

double inverse_recursion_rhs(QParam x, int spin_count, double nu) {
  const double r = inverse_recursion_ratio(x, spin_count, nu);
  return 2.0 * (r - 1.0) / (r + 1.0);
}

GaussianSummary inverse_gaussian(const ModelParams& params) {
  require_semiclassical_domain(params);
  const QParam x = params.x();
  const double n = params.spin_count;
  const double one_minus = x.one_minus_pow(n);  // 1 - x^{2S}
  const double two_minus = 1.0 + one_minus;     // 2 - x^{2S}
  GaussianSummary s;
  s.process = Process::inverse;
  s.mean = -std::log1p(one_minus) / x.log();
  s.variance = -(one_minus * one_minus) / (two_minus * two_minus * x.log());
  s.outside_support = s.mean < 0.0 || s.mean > n;
  return s;
}

EulerLimit forward_largeg_euler(const ModelParams& params, double tol) {
  require_semiclassical_domain(params);
  const QParam x = params.x();
  const double lx = x.log();
  const int n = params.spin_count;
  const double log_inf = log_q_pochhammer_infinite(lx, lx, tol);

  EulerLimit out;
  out.in_stated_regime = strong_coupling(params);

  std::vector<double> logs(static_cast<std::size_t>(n) + 1);
  double log_fin = 0.0;  // ln (x;x)_f
  for (int f = 0; f <= n; ++f) {
    if (f > 0) log_fin += x.log_one_minus_pow(f);
    logs[static_cast<std::size_t>(f)] = f * lx + log_inf - log_fin;
  }
  const double log_kept = log_sum_exp(logs);

  // Untruncated terms beyond f = 2S decay at least geometrically once x^{f+1} < 1 - x.
  double tail = 0.0;
  double lf = log_fin;
  for (long f = n + 1; f < n + 100'000'000L; ++f) {
    lf += x.log_one_minus_pow(static_cast<double>(f));
    const double term = std::exp(f * lx + log_inf - lf);
    tail += term;
    if (term == 0.0 || (term < 1e-17 * tail && std::exp(lx) / x.one_minus_pow(f + 1.0) < 1.0)) break;
  }
  out.tail_mass = tail;

  double series = 0.0;
  const double one_minus_x = x.one_minus_pow(1.0);
  for (int j = 1;; ++j) {
    series += 1.0 / std::expm1(-j * lx);
    const double next = std::exp((j + 1) * lx);
    if (next / (one_minus_x * x.one_minus_pow(j + 1.0)) <= tol) break;
  }
  out.mean_f_series = series;
  out.boson_number = n - series;

  for (auto& v : logs) v -= log_kept;
  out.by_f = Distribution(std::move(logs), Process::forward);
  out.mean_f_truncated = out.by_f.mean();
  return out;
}

double log_inverse_largeg(const ModelParams& params, int nu, double tol) {
  require_semiclassical_domain(params);
  if (nu < 0) throw std::domain_error("inverse_largeg: nu must be >= 0");
  const QParam x = params.x();
  const double lx = x.log();
  return static_cast<double>(nu) * nu * lx + log_q_pochhammer_infinite(lx, lx, tol) -
         2.0 * log_q_pochhammer(lx, lx, nu);
}

double inverse_largeg(const ModelParams& params, int nu, double tol) {
  return std::exp(log_inverse_largeg(params, nu, tol));
}

BosonEstimate comparison_altland_forward(const ModelParams& params) {
  require_no_initial_bosons(params);
  const QParam x = params.x();
  const double n = params.spin_count;
  // 2S (x^{-2S} - 1)/(x^{-2S} + 2S), multiplied through by x^{2S}.
  const double value = n * x.one_minus_pow(n) / (1.0 + n * std::exp(n * x.log()));
  return {value, params.g * n < 1.0};
}

BosonEstimate comparison_itin_forward(const ModelParams& params) {
  require_semiclassical_domain(params);
  const double lx = params.x().log();
  return {params.spin_count - (std::log(-lx) - kEulerGamma) / lx, strong_coupling(params)};
}

BosonEstimate comparison_inverse_linear(const ModelParams& params) {
  require_semiclassical_domain(params);
  return {-std::numbers::ln2 / params.x().log(), strong_coupling(params)};
}

}  // namespace dtcm
