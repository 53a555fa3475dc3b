#include "dtcm/qspecial.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtcm/distribution.hpp"

namespace dtcm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.69314718055994530941723212145818;

// ln(1 - e^v) for v <= 0.
double log1mexp(double v) {
  if (v == 0.0) return kNegInf;
  if (v < -kLn2) return std::log1p(-std::exp(v));
  return std::log(-std::expm1(v));
}

void check_order(int k, const char* what) {
  if (k < 0) throw std::invalid_argument(std::string(what) + ": negative order");
}

}  // namespace

QParam QParam::from_coupling(double g) {
  if (!std::isfinite(g) || g < 0.0) throw std::invalid_argument("QParam: coupling must be finite and >= 0");
  return QParam(-kTwoPi * g * g);
}

QParam QParam::from_log(double log_x) {
  if (std::isnan(log_x) || log_x > 0.0) throw std::invalid_argument("QParam: ln x must be <= 0");
  return QParam(log_x);
}

QParam QParam::from_value(double x) {
  if (!(x > 0.0) || x > 1.0) throw std::invalid_argument("QParam: x must lie in (0, 1]");
  return QParam(std::log(x));
}

double QParam::log_one_minus_pow(double k) const { return log1mexp(k * log_x_); }

double q_pochhammer(double a, double q, int k) {
  check_order(k, "q_pochhammer");
  double result = 1.0;
  double aqi = a;
  for (int i = 0; i < k; ++i) {
    result *= 1.0 - aqi;
    aqi *= q;
  }
  return result;
}

double log_q_pochhammer(double log_a, double log_q, int k) {
  check_order(k, "log_q_pochhammer");
  if (std::isnan(log_a) || std::isnan(log_q) || log_q > 0.0)
    throw std::domain_error("log_q_pochhammer: requires ln q <= 0");
  if (k == 0 || log_a == kNegInf) return 0.0;
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    const double e = log_a + i * log_q;
    if (e > 0.0) throw std::domain_error("log_q_pochhammer: negative factor 1 - a q^i");
    sum += log1mexp(e);
  }
  return sum;
}

double q_pochhammer_infinite(double a, double q, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("q_pochhammer_infinite: tol must be > 0");
  if (!(q > 0.0 && q < 1.0) || !(a >= 0.0 && a < 1.0))
    throw std::domain_error("q_pochhammer_infinite: requires 0 <= a < 1 and 0 < q < 1");
  double result = 1.0;
  double term = a;
  while (term > 0.0) {
    if (term / ((1.0 - q) * (1.0 - term)) <= tol) break;
    result *= 1.0 - term;
    term *= q;
  }
  return result;
}

double log_q_pochhammer_infinite(double log_a, double log_q, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("log_q_pochhammer_infinite: tol must be > 0");
  if (!(log_q < 0.0) || std::isnan(log_a) || !(log_a < 0.0))
    throw std::domain_error("log_q_pochhammer_infinite: requires ln a < 0 and ln q < 0");
  const double one_minus_q = -std::expm1(log_q);
  double sum = 0.0;
  for (double e = log_a; e > kNegInf; e += log_q) {
    const double term = std::exp(e);
    if (term / (one_minus_q * (1.0 - term)) <= tol) break;
    sum += log1mexp(e);
  }
  return sum;
}

double q_binomial(int n, int k, QParam x) {
  if (n < 0 || k < 0 || k > n) throw std::domain_error("q_binomial: requires 0 <= k <= n");
  const int m = std::min(k, n - k);
  double result = 1.0;
  for (int j = 1; j <= m; ++j) {
    if (x.is_unity()) {
      result *= static_cast<double>(n - m + j) / j;
    } else {
      result *= x.one_minus_pow(n - m + j) / x.one_minus_pow(j);
    }
  }
  return result;
}

double log_q_binomial(int n, int k, QParam x) {
  if (n < 0 || k < 0 || k > n) throw std::domain_error("log_q_binomial: requires 0 <= k <= n");
  const int m = std::min(k, n - k);
  double sum = 0.0;
  for (int j = 1; j <= m; ++j) {
    if (x.is_unity()) {
      sum += std::log(static_cast<double>(n - m + j) / j);
    } else {
      sum += x.log_one_minus_pow(n - m + j) - x.log_one_minus_pow(j);
    }
  }
  return sum;
}

double q_digamma(double q, double z, double tol) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("q_digamma: requires 0 < q < 1");
  if (!(z > 0.0)) throw std::domain_error("q_digamma: requires z > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("q_digamma: tol must be > 0");
  const double lq = std::log(q);
  const double one_minus_q = -std::expm1(lq);
  auto term = [lq](double n_plus_z) {
    const double e = n_plus_z * lq;
    return std::exp(e) / -std::expm1(e);
  };
  double sum = 0.0;
  double next = term(z);
  for (double n = 0.0;; n += 1.0) {
    sum += next;
    next = term(n + 1.0 + z);
    // successive terms shrink at least by a factor q; half the budget is left for rounding
    if (-lq * next / one_minus_q < 0.5 * tol) break;
  }
  return lq * sum - std::log1p(-q);
}

QBinomialDistSpec QBinomialDistSpec::from_tau(int n, double tau, QParam q) {
  if (!(tau > 0.0) || tau > 1.0) throw std::invalid_argument("QBinomialDistSpec: tau must lie in (0, 1]");
  QBinomialDistSpec spec{n, std::log(tau), q};
  spec.validate();
  return spec;
}

void QBinomialDistSpec::validate() const {
  if (n < 0) throw std::invalid_argument("QBinomialDistSpec: n must be >= 0");
  if (!std::isfinite(log_tau) || log_tau > 0.0)
    throw std::invalid_argument("QBinomialDistSpec: tau must lie in (0, 1]");
}

Distribution q_binomial_distribution(const QBinomialDistSpec& spec) {
  spec.validate();
  std::vector<double> log_probs(static_cast<std::size_t>(spec.n) + 1);
  for (int k = 0; k <= spec.n; ++k) {
    const double tau_k = spec.log_tau == 0.0 ? 0.0 : k * spec.log_tau;
    log_probs[static_cast<std::size_t>(k)] = log_q_binomial(spec.n, k, spec.q) + tau_k +
                                             log_q_pochhammer(spec.log_tau, spec.q.log(), spec.n - k);
  }
  return Distribution(std::move(log_probs));
}

}  // namespace dtcm
