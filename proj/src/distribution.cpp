#include "dtcm/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dtcm {

const char* to_string(Process p) {
  switch (p) {
    case Process::forward: return "forward";
    case Process::inverse: return "inverse";
    case Process::none: break;
  }
  return "none";
}

double log_sum_exp(std::span<const double> values) {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  double hi = neg_inf;
  for (double v : values) hi = std::max(hi, v);
  if (hi == neg_inf) return neg_inf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

Distribution::Distribution(std::vector<double> log_probs, Process process)
    : log_probs_(std::move(log_probs)), process_(process) {
  for (double v : log_probs_) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw std::invalid_argument("Distribution: log-probabilities must be finite or -infinity");
  }
}

Distribution Distribution::from_linear(std::span<const double> probs, Process process) {
  std::vector<double> logs;
  logs.reserve(probs.size());
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("Distribution: negative or NaN probability");
    logs.push_back(std::log(p));
  }
  return Distribution(std::move(logs), process);
}

Distribution Distribution::point_mass(std::size_t size, std::size_t at, Process process) {
  if (at >= size) throw std::invalid_argument("Distribution: point mass outside support");
  std::vector<double> logs(size, -std::numeric_limits<double>::infinity());
  logs[at] = 0.0;
  return Distribution(std::move(logs), process);
}

double Distribution::prob(std::size_t i) const { return std::exp(log_probs_.at(i)); }

std::vector<double> Distribution::probs() const {
  std::vector<double> out;
  out.reserve(log_probs_.size());
  for (double v : log_probs_) out.push_back(std::exp(v));
  return out;
}

double Distribution::log_total() const { return log_sum_exp(log_probs_); }

double Distribution::total() const { return std::exp(log_total()); }

double Distribution::mean() const {
  const double lt = log_total();
  double m = 0.0;
  for (std::size_t i = 0; i < log_probs_.size(); ++i) m += static_cast<double>(i) * std::exp(log_probs_[i] - lt);
  return m;
}

double Distribution::variance() const {
  const double lt = log_total();
  const double m = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < log_probs_.size(); ++i) {
    const double d = static_cast<double>(i) - m;
    v += d * d * std::exp(log_probs_[i] - lt);
  }
  return v;
}

std::size_t Distribution::mode() const {
  if (log_probs_.empty()) throw std::logic_error("Distribution: mode of empty distribution");
  return static_cast<std::size_t>(std::max_element(log_probs_.begin(), log_probs_.end()) - log_probs_.begin());
}

Distribution Distribution::reversed() const {
  std::vector<double> r(log_probs_.rbegin(), log_probs_.rend());
  return Distribution(std::move(r), process_);
}

}  // namespace dtcm
