#pragma once

// q-special functions used by the exact and asymptotic probability formulas.
//
// Everything here is a pure function. Linear-domain routines are convenient for
// small arguments; the log-domain companions are what the probability
// pipelines use, because x^{(N_B+1)(2S-nu)} underflows long before S ~ 10^3.

#include <cmath>
#include <limits>

namespace dtcm {

inline constexpr double kDefaultTol = 1e-14;
inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Deformation parameter x = exp(-2 pi g^2), stored together with its logarithm.
///
/// ln x is kept as the primary quantity. Near x = 1 (weak coupling) the value
/// 1 - x^k is computed as -expm1(k ln x); re-deriving ln x from x would lose
/// every significant digit.
class QParam {
 public:
  /// x = exp(-2 pi g^2). Throws std::invalid_argument for negative or non-finite g.
  static QParam from_coupling(double g);
  /// Requires log_x <= 0.
  static QParam from_log(double log_x);
  /// Requires 0 < x <= 1.
  static QParam from_value(double x);

  double value() const { return std::exp(log_x_); }
  double log() const { return log_x_; }
  bool is_unity() const { return log_x_ == 0.0; }

  /// 1 - x^k without cancellation.
  double one_minus_pow(double k) const { return -std::expm1(k * log_x_); }
  /// ln(1 - x^k); -infinity at x = 1 or k = 0.
  double log_one_minus_pow(double k) const;

 private:
  explicit QParam(double log_x) : log_x_(log_x) {}
  double log_x_;
};

/// (a; q)_k = prod_{i=0}^{k-1} (1 - a q^i). k = 0 gives exactly 1.
double q_pochhammer(double a, double q, int k);

/// ln (a; q)_k from ln a and ln q.
///
/// Each factor is evaluated as log(-expm1(log_a + i log_q)). A factor that is
/// exactly zero makes the result -infinity. log_a + i log_q > 0 means a negative
/// factor and throws std::domain_error. log_q = 0 (q = 1) is accepted.
double log_q_pochhammer(double log_a, double log_q, int k);

/// (a; q)_infinity for 0 <= a < 1, 0 < q < 1.
///
/// The product stops at the first index K with a q^K / ((1 - q)(1 - a q^K)) <= tol,
/// which bounds the relative error of the truncated product by tol.
double q_pochhammer_infinite(double a, double q, double tol = kDefaultTol);

/// Log-domain form of q_pochhammer_infinite; takes ln a (may be -infinity) and ln q < 0.
double log_q_pochhammer_infinite(double log_a, double log_q, double tol = kDefaultTol);

/// Gaussian binomial coefficient [n k]_x. At x = 1 returns the ordinary binomial.
/// Evaluated as a product over min(k, n-k) ratios so that [n k] == [n n-k] bitwise.
double q_binomial(int n, int k, QParam x);
double log_q_binomial(int n, int k, QParam x);

/// q-digamma psi_q(z) = ln q sum_{n>=0} q^{n+z}/(1 - q^{n+z}) - ln(1 - q),
/// restricted to 0 < q < 1 and z > 0. Summation stops once the remaining tail is below tol.
double q_digamma(double q, double z, double tol = kDefaultTol);

/// Parameters of the q-deformed binomial (q-Bernstein) distribution
/// B_k^n(tau; q) = [n k]_q tau^k (tau; q)_{n-k}.
struct QBinomialDistSpec {
  int n = 0;
  double log_tau = 0.0;  // ln tau, tau in (0, 1]
  QParam q = QParam::from_value(1.0);

  static QBinomialDistSpec from_tau(int n, double tau, QParam q);
  void validate() const;
};

class Distribution;

/// Full probability vector over k = 0..n, computed in log domain.
Distribution q_binomial_distribution(const QBinomialDistSpec& spec);

}  // namespace dtcm
