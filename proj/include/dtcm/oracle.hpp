#pragma once

// Brute-force check of the exact solution: integrate the time-dependent
// Schroedinger equation
//   H(t) = sum_i (e_i - t) s_i + g sum_i (a^+ s_i^- + a s_i^+)
// inside one conserved-excitation sector over a finite window [t_start, t_end].

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dtcm/model.hpp"

namespace dtcm {

/// Raised when the integrator cannot meet its tolerances or the norm drifts.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Diabatic states of one excitation sector N_e = bosons + up spins.
class SectorBasis {
 public:
  /// Every configuration with nonnegative boson number, lexicographic order.
  /// Splittings must be strictly decreasing and match spin_count.
  SectorBasis(int excitations, std::vector<double> splittings);
  /// Explicit state list, e.g. a permutation of the canonical order.
  SectorBasis(int excitations, std::vector<double> splittings, std::vector<SpinConfig> states);

  /// Sector containing the all-up state with params.n_bosons bosons.
  static SectorBasis for_params(const ModelParams& params, std::vector<double> splittings);
  /// e_i = spacing * ((N_s - 1)/2 - (i - 1)): centred, decreasing.
  static std::vector<double> equally_spaced(int spin_count, double spacing = 2.0);

  int excitations() const { return excitations_; }
  int spin_count() const { return static_cast<int>(splittings_.size()); }
  int dimension() const { return static_cast<int>(states_.size()); }
  const std::vector<double>& splittings() const { return splittings_; }
  const std::vector<SpinConfig>& states() const { return states_; }
  const SpinConfig& state(int i) const { return states_.at(static_cast<std::size_t>(i)); }
  int bosons(int i) const;
  /// Position of `config`, or -1 if it is not in the sector.
  int find(const SpinConfig& config) const;

 private:
  void check();

  int excitations_;
  std::vector<double> splittings_;
  std::vector<SpinConfig> states_;
  std::map<SpinConfig, int> lookup_;
};

/// H(t) = coupling + diag(offset) - t diag(slope) in a sector basis.
struct SectorHamiltonian {
  Eigen::MatrixXd coupling;
  Eigen::VectorXd offset;  // sum_i e_i s_i
  Eigen::VectorXd slope;   // sum_i s_i

  Eigen::MatrixXcd at(double t) const;
};

SectorHamiltonian sector_hamiltonian(const SectorBasis& basis, const ModelParams& params);

/// Dense Hermitian H(t). Throws std::invalid_argument if basis and params disagree.
Eigen::MatrixXcd build_hamiltonian(const SectorBasis& basis, const ModelParams& params, double t);

/// bare: integrate psi directly. rotating_diabatic: integrate the amplitudes
/// c = e^{i phi} psi with the diabatic phases phi removed.
enum class Frame { bare, rotating_diabatic };

struct EvolutionConfig {
  double t_start = -100.0;
  double t_end = 100.0;
  double rtol = 1e-10;
  double atol = 1e-12;
  /// The rotating frame takes several times fewer steps for the same tolerances and
  /// keeps the norm drift orders of magnitude lower.
  Frame frame = Frame::rotating_diabatic;
  /// Final |norm - 1| above this is an error (never silently renormalised).
  double max_norm_drift = 1e-8;
  long max_steps = 200'000'000;

  static EvolutionConfig symmetric(double half_width);
  void validate() const;
};

/// Default half-width: 100 / max(1, spread), widened to 10 max|e_i| when
/// the crossings (at t = e_i) would otherwise fall near or outside the window.
double default_window(const SectorBasis& basis);

struct EvolutionResult {
  /// |amplitude|^2 per basis state at t_end.
  std::vector<double> probabilities;
  double norm_drift = 0.0;
  long steps = 0;
  long rejected = 0;
};

/// Adaptive Dormand-Prince 5(4) integration from `initial` at t_start.
/// Throws NumericalError on step-size underflow, step budget exhaustion or norm drift.
EvolutionResult evolve(const SectorBasis& basis, const ModelParams& params,
                       const EvolutionConfig& config, const SpinConfig& initial);

struct ConvergenceReport {
  std::vector<double> windows;                   // half-widths T
  std::vector<std::vector<double>> probabilities;  // one row per T
  /// Two-point Richardson extrapolation in 1/T using the two largest windows.
  std::vector<double> extrapolated;
  /// Max |P(T_last) - P(T_prev)| over basis states.
  double last_change = 0.0;
  bool converged = false;
};

/// Runs evolve on each symmetric window in `schedule` (strictly increasing).
/// `tolerance` is the last-change threshold for the converged flag.
ConvergenceReport converge_window(const SectorBasis& basis, const ModelParams& params,
                                  const SpinConfig& initial, const std::vector<double>& schedule,
                                  double tolerance = 2e-2, EvolutionConfig base = {});

}  // namespace dtcm
