#pragma once

// Approximations to the polarised distributions at N_B = 0: continuous and
// Gaussian limits, the strong-coupling limits, and the semiclassical mean
// boson numbers from earlier literature (kept for comparison only).
//
// Regime thresholds (g compared with 1/(2S)) are reported as metadata and
// never reject an evaluation.

#include <functional>

#include "dtcm/distribution.hpp"
#include "dtcm/model.hpp"

namespace dtcm {

/// Continuous approximation to a discrete distribution over nu in [0, 2S].
///
/// The normalisation constant is chosen so that the curve sampled at the
/// integers 0..2S sums to one (not so that its integral is one).
class ContinuousCurve {
 public:
  using Fn = std::function<double(double)>;

  ContinuousCurve(Fn log_shape, Fn log_derivative, int spin_count, Process process);

  /// Normalised density at real nu.
  double density(double nu) const;
  double log_density(double nu) const { return log_shape_(nu) - log_norm_; }
  /// d ln(density)/d nu, analytic.
  double log_derivative(double nu) const { return log_derivative_(nu); }
  /// ln C, where density = C * shape.
  double log_normalization() const { return -log_norm_; }
  /// Curve sampled at nu = 0..2S.
  Distribution sample() const;
  /// Integer nu in 0..2S maximising the curve.
  int argmax() const;

  int spin_count() const { return spin_count_; }
  Process process() const { return process_; }

 private:
  Fn log_shape_;
  Fn log_derivative_;
  int spin_count_;
  Process process_;
  double log_norm_ = 0.0;
};

struct GaussianSummary {
  double mean = 0.0;
  double variance = 0.0;
  Process process = Process::none;
  /// Set when the mean lies outside [0, 2S]; the values themselves are not clipped.
  bool outside_support = false;

  double density(double nu) const;
};

/// Strong-coupling (Euler distribution) limit of the forward process, indexed
/// by f = 2S - nu: P_f ~ x^f (x;x)_inf / (x;x)_f.
struct EulerLimit {
  /// Truncated at f = 2S and renormalised, indexed by f.
  Distribution by_f;
  /// <f> = sum_{j>=1} 1/(x^{-j} - 1) of the untruncated distribution.
  double mean_f_series = 0.0;
  /// <f> of the truncated, renormalised distribution.
  double mean_f_truncated = 0.0;
  /// Untruncated probability mass at f > 2S.
  double tail_mass = 0.0;
  /// n_b = 2S - <f> with the series mean.
  double boson_number = 0.0;
  bool in_stated_regime = false;
};

/// Mean boson number estimate together with its validity flag.
struct BosonEstimate {
  double n_b = 0.0;
  bool in_stated_regime = false;
};

/// Throws std::domain_error unless N_B = 0 and 0 < x < 1.
void require_semiclassical_domain(const ModelParams& params);

/// True when g > 1/(2S).
bool strong_coupling(const ModelParams& params);

/// P_{0->nu} ~ C exp(2(1-x) nu/(1+x)) (1 + x - x^{2S+1/2-nu})^{-4x/((1+x) ln x)}.
ContinuousCurve forward_continuous(const ModelParams& params);
double forward_continuous(const ModelParams& params, double nu);

/// Right-hand side of the forward log-derivative equation in f = 2S - nu:
/// (1/P) dP/df at f + 1/2 equals 2 (2x/(x + 1 - x^{f+1}) - 1).
double forward_recursion_rhs(QParam x, double f);

GaussianSummary forward_gaussian(const ModelParams& params);

/// Explicit solution of the inverse log-derivative equation (exp, arctan and
/// power factors).
ContinuousCurve inverse_continuous(const ModelParams& params);
double inverse_continuous(const ModelParams& params, double nu);

/// Ratio P_{2S->nu+1} / P_{2S->nu} = (x^{2nu+1} - x^{2S+nu+1}) / (1 - x^{nu+1})^2.
double inverse_recursion_ratio(QParam x, int spin_count, double nu);
/// 2 (R - 1)/(R + 1) for that ratio R: the log-derivative at nu + 1/2.
double inverse_recursion_rhs(QParam x, int spin_count, double nu);

GaussianSummary inverse_gaussian(const ModelParams& params);

EulerLimit forward_largeg_euler(const ModelParams& params, double tol = kDefaultTol);

/// P_{2S->nu} ~ x^{nu^2} (x;x)_inf / ((x;x)_nu)^2.
double inverse_largeg(const ModelParams& params, int nu, double tol = kDefaultTol);
double log_inverse_largeg(const ModelParams& params, int nu, double tol = kDefaultTol);

/// Diagrammatic estimate n_b ~ 2S (x^{-2S} - 1)/(x^{-2S} + 2S), stated for g < 1/(2S).
BosonEstimate comparison_altland_forward(const ModelParams& params);
/// Painleve-II asymptotics n_b = 2S - (ln(-ln x) - gamma)/ln x, stated for g > 1/(2S).
BosonEstimate comparison_itin_forward(const ModelParams& params);
/// n_b ~ ln 2/(2 pi g^2), stated for g > 1/(2S).
BosonEstimate comparison_inverse_linear(const ModelParams& params);

}  // namespace dtcm
