#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtcm/qspecial.hpp"

namespace dtcm {

/// Diabatic state label |s_1 ... s_Ns>: s_i = 1 for spin up, 0 for down.
///
/// Index 0 here is spin 1, the spin with the largest splitting. Splittings are
/// assumed strictly ordered, e_1 > e_2 > ... > e_Ns; exactly degenerate
/// splittings are outside the solved model and are not representable.
class SpinConfig {
 public:
  SpinConfig() = default;
  explicit SpinConfig(std::vector<std::uint8_t> bits);

  /// Parses "1010..." with spin 1 leftmost. Throws std::invalid_argument.
  static SpinConfig parse(std::string_view text);
  static SpinConfig all_up(int spin_count);
  static SpinConfig all_down(int spin_count);
  /// Bit pattern of `code` read MSB first as spin 1; used for enumeration.
  static SpinConfig from_index(std::uint64_t code, int spin_count);

  int size() const { return static_cast<int>(bits_.size()); }
  /// 1-based spin index, as in the physics notation.
  bool up(int spin) const { return bits_.at(static_cast<std::size_t>(spin - 1)) != 0; }
  int up_count() const;
  /// nu: number of down spins.
  int down_count() const { return size() - up_count(); }

  SpinConfig complement() const;
  SpinConfig with_flipped(int spin) const;
  std::uint64_t index() const;
  std::string to_string() const;

  std::span<const std::uint8_t> bits() const { return bits_; }

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;
  friend auto operator<=>(const SpinConfig&, const SpinConfig&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Model parameters: coupling g (in units of the square root of the sweep
/// rate), the boson number N_B of the all-up state, and the spin count N_s = 2S.
struct ModelParams {
  double g = 0.0;
  int n_bosons = 0;
  int spin_count = 1;

  /// Throws std::invalid_argument on g < 0, non-finite g, n_bosons < 0 or spin_count < 1.
  void validate() const;

  QParam x() const { return QParam::from_coupling(g); }
  double spin() const { return 0.5 * spin_count; }
  /// ln p_k = -2 pi g^2 (N_B + k).
  double log_stay(int k) const;
  /// ln q_k = ln(1 - p_k).
  double log_flip(int k) const;
};

/// Upper bound on spin count for exhaustive enumerators. The environment
/// variable DTCM_MAX_BRUTEFORCE_NS, when set to a positive integer, replaces
/// `fallback`.
int bruteforce_spin_limit(int fallback);

}  // namespace dtcm
