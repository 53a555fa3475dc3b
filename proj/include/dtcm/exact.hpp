#pragma once

// Exact scattering probabilities of the driven Tavis-Cummings model.
//
// State-to-state probabilities are products of pairwise Landau-Zener factors
// p_k = exp(-2 pi g^2 (N_B + k)) and q_k = 1 - p_k. The spins are visited from
// the smallest splitting (spin N_s) to the largest (spin 1); the factor index
// k is one plus the number of down spins among all the other spins at that
// step. Fully polarised initial states reduce to q-Pochhammer closed forms.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtcm/distribution.hpp"
#include "dtcm/model.hpp"

namespace dtcm {

enum class FactorKind { flip, stay };

struct Factor {
  int k = 1;
  FactorKind kind = FactorKind::stay;

  friend bool operator==(const Factor&, const Factor&) = default;
};

/// Canonical factor order: ascending k, and q_k before p_k at equal k.
bool factor_less(const Factor& a, const Factor& b);

/// Exact symbolic transition probability: a multiset of indexed p/q factors.
///
/// Factors are kept sorted canonically, so equality is multiset equality.
class Monomial {
 public:
  struct Term {
    Factor factor;
    int power = 1;
  };

  Monomial() = default;
  explicit Monomial(std::vector<Factor> factors);

  /// Parses "q2*p2*q3" or "p4*p5^2*p6*q5^3". "1" is the empty product.
  static Monomial parse(std::string_view text);

  std::span<const Factor> factors() const { return factors_; }
  std::size_t degree() const { return factors_.size(); }
  std::vector<Term> terms() const;

  /// Subscript reflection k -> spin_count + 1 - k.
  Monomial reflected(int spin_count) const;

  /// ln of the product for the given parameters; -infinity if a q factor vanishes (g = 0).
  double log_value(const ModelParams& params) const;
  double value(const ModelParams& params) const;

  /// "q2*p2*q3", "q3*q4^5*q5"; the empty product prints as "1".
  std::string to_string() const;

  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<Factor> factors_;
};

/// Symbolic monomial for I -> F. Independent of g. Throws std::invalid_argument
/// when the configurations differ in length or are empty.
Monomial transition_monomial(const SpinConfig& initial, const SpinConfig& final_state);

/// P_{I->F}. Also checks the configurations against params.spin_count.
double transition_probability(const SpinConfig& initial, const SpinConfig& final_state,
                              const ModelParams& params);

/// True when the monomial of (complement I, complement F) equals the monomial
/// of (I, F) with every subscript reflected. Exact symbolic comparison.
bool verify_complement_symmetry(const SpinConfig& initial, const SpinConfig& final_state);

/// Distribution of nu (number of down spins) after scattering from `initial`,
/// obtained by summing transition_probability over all 2^Ns final states.
/// Guarded by bruteforce_spin_limit(20) unless max_spins is given.
Distribution polarization_marginal(const SpinConfig& initial, const ModelParams& params,
                                   std::optional<int> max_spins = std::nullopt);

/// P_{0->nu} = [2S nu]_x x^{(N_B+1)(2S-nu)} (x^{N_B+1}; x)_nu.
Distribution forward_distribution(const ModelParams& params);

/// P_{2S->nu} = [2S nu]_x x^{(N_B+nu) nu} (x^{N_B+nu+1}; x)_{2S-nu}.
Distribution inverse_distribution(const ModelParams& params);

/// Polarised distributions as explicit sums over integer compositions:
///
///   P_{0->nu}  = prod_{k=1}^{nu} (1-p_k)   * sum_{|i| = 2S-nu} prod_{r=1}^{nu+1} p_r^{i_r}
///   P_{2S->nu} = prod_{k=nu+1}^{2S} (1-p_k) * sum_{|i| = nu}   prod_{r=nu}^{2S}  p_r^{i_r}
///
/// The composition count grows combinatorially; 2S is limited to
/// bruteforce_spin_limit(30) unless max_spins is given.
Distribution forward_distribution_rawsum(const ModelParams& params,
                                         std::optional<int> max_spins = std::nullopt);
Distribution inverse_distribution_rawsum(const ModelParams& params,
                                         std::optional<int> max_spins = std::nullopt);

/// Canonical partition function of N bosons on n unit-spaced levels,
/// Z_N = (x^n; x)_N / (x; x)_N.
double partition_function(int bosons, int levels, QParam x);
double log_partition_function(int bosons, int levels, QParam x);

/// Same quantity summed over all occupations (i_1..i_n), sum i_r = N, of prod x^{(r-1) i_r}.
double partition_function_bruteforce(int bosons, int levels, QParam x);

}  // namespace dtcm
