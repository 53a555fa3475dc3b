#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dtcm {

enum class Process { none, forward, inverse };

const char* to_string(Process p);

/// Discrete probability distribution over 0..size-1, stored as natural-log
/// probabilities. Entries are finite or -infinity, never NaN.
///
/// Moments are direct sums over the support (log-sum-exp normalised); no
/// closed forms are used here.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::vector<double> log_probs, Process process = Process::none);

  static Distribution from_linear(std::span<const double> probs, Process process = Process::none);
  /// Point mass at index `at` over 0..size-1.
  static Distribution point_mass(std::size_t size, std::size_t at, Process process = Process::none);

  std::size_t size() const { return log_probs_.size(); }
  Process process() const { return process_; }

  double log_prob(std::size_t i) const { return log_probs_.at(i); }
  double prob(std::size_t i) const;
  std::span<const double> log_probs() const { return log_probs_; }
  std::vector<double> probs() const;

  /// log sum_i p_i.
  double log_total() const;
  double total() const;
  /// Moments of the normalised distribution.
  double mean() const;
  double variance() const;
  /// Index of the largest probability; the smallest index wins ties.
  std::size_t mode() const;

  /// Same entries, reversed index order (k -> size-1-k).
  Distribution reversed() const;

 private:
  std::vector<double> log_probs_;
  Process process_ = Process::none;
};

/// log(sum exp(v_i)); -infinity for an empty or all -infinity input.
double log_sum_exp(std::span<const double> values);

}  // namespace dtcm
