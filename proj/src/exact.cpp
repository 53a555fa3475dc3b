#include "dtcm/exact.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dtcm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Streaming log-sum-exp.
struct LogAccumulator {
  double hi = kNegInf;
  double sum = 0.0;

  void add(double v) {
    if (v == kNegInf) return;
    if (v <= hi) {
      sum += std::exp(v - hi);
    } else {
      sum = sum * std::exp(hi - v) + 1.0;
      hi = v;
    }
  }
  double value() const { return hi == kNegInf ? kNegInf : hi + std::log(sum); }
};

void check_pair(const SpinConfig& a, const SpinConfig& b) {
  if (a.size() == 0) throw std::invalid_argument("transition: empty spin configuration");
  if (a.size() != b.size()) throw std::invalid_argument("transition: initial and final configurations differ in length");
}

void check_params(const SpinConfig& c, const ModelParams& params) {
  params.validate();
  if (c.size() != params.spin_count)
    throw std::invalid_argument("transition: configuration length does not match N_s");
}

int polarised_limit(const ModelParams& params, std::optional<int> max_spins) {
  params.validate();
  const int limit = max_spins.value_or(bruteforce_spin_limit(30));
  if (params.spin_count > limit)
    throw std::length_error("raw composition sum: 2S = " + std::to_string(params.spin_count) +
                            " exceeds the enumeration limit " + std::to_string(limit));
  return limit;
}

// Sum over compositions (i_0..i_{parts-1}), sum = total, of prod stay[r]^{i_r}.
// Parts are added one at a time: h'[t] = sum_i s^i h[t-i] = h[t] + s h'[t-1].
double composition_sum(std::span<const double> stay, int total) {
  std::vector<double> h(static_cast<std::size_t>(total) + 1, 0.0);
  h[0] = 1.0;
  for (const double s : stay) {
    for (std::size_t t = 1; t < h.size(); ++t) h[t] += s * h[t - 1];
  }
  return h.back();
}

double stay_probability(const ModelParams& params, int k) { return std::exp(params.log_stay(k)); }

double flip_probability(const ModelParams& params, int k) { return -std::expm1(params.log_stay(k)); }

}  // namespace

bool factor_less(const Factor& a, const Factor& b) {
  if (a.k != b.k) return a.k < b.k;
  return a.kind == FactorKind::flip && b.kind == FactorKind::stay;
}

Monomial::Monomial(std::vector<Factor> factors) : factors_(std::move(factors)) {
  for (const auto& f : factors_) {
    if (f.k < 1) throw std::invalid_argument("Monomial: factor subscripts start at 1");
  }
  std::sort(factors_.begin(), factors_.end(), factor_less);
}

Monomial Monomial::parse(std::string_view text) {
  std::vector<Factor> factors;
  if (text == "1") return Monomial{};
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t star = std::min(text.find('*', pos), text.size());
    std::string_view tok = text.substr(pos, star - pos);
    if (tok.size() < 2 || (tok[0] != 'p' && tok[0] != 'q'))
      throw std::invalid_argument("Monomial: bad factor \"" + std::string(tok) + "\"");
    const FactorKind kind = tok[0] == 'p' ? FactorKind::stay : FactorKind::flip;
    tok.remove_prefix(tok[1] == '_' ? 2 : 1);
    const std::size_t caret = std::min(tok.find('^'), tok.size());
    int k = 0;
    int power = 1;
    auto parse_int = [&](std::string_view s, int& out) {
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      if (ec != std::errc{} || ptr != s.data() + s.size() || out < 1)
        throw std::invalid_argument("Monomial: bad integer in \"" + std::string(text) + "\"");
    };
    parse_int(tok.substr(0, caret), k);
    if (caret < tok.size()) parse_int(tok.substr(caret + 1), power);
    factors.insert(factors.end(), static_cast<std::size_t>(power), Factor{k, kind});
    pos = star + 1;
  }
  return Monomial(std::move(factors));
}

std::vector<Monomial::Term> Monomial::terms() const {
  std::vector<Term> out;
  for (const auto& f : factors_) {
    if (!out.empty() && out.back().factor == f) {
      ++out.back().power;
    } else {
      out.push_back({f, 1});
    }
  }
  return out;
}

Monomial Monomial::reflected(int spin_count) const {
  std::vector<Factor> out;
  out.reserve(factors_.size());
  for (const auto& f : factors_) {
    if (f.k > spin_count) throw std::invalid_argument("Monomial: subscript exceeds N_s");
    out.push_back({spin_count + 1 - f.k, f.kind});
  }
  return Monomial(std::move(out));
}

double Monomial::log_value(const ModelParams& params) const {
  params.validate();
  double sum = 0.0;
  for (const auto& f : factors_) {
    if (f.k > params.spin_count) throw std::invalid_argument("Monomial: subscript exceeds N_s");
    sum += f.kind == FactorKind::stay ? params.log_stay(f.k) : params.log_flip(f.k);
  }
  return sum;
}

double Monomial::value(const ModelParams& params) const { return std::exp(log_value(params)); }

std::string Monomial::to_string() const {
  if (factors_.empty()) return "1";
  std::string s;
  for (const auto& t : terms()) {
    if (!s.empty()) s += '*';
    s += t.factor.kind == FactorKind::stay ? 'p' : 'q';
    s += std::to_string(t.factor.k);
    if (t.power > 1) s += '^' + std::to_string(t.power);
  }
  return s;
}

Monomial transition_monomial(const SpinConfig& initial, const SpinConfig& final_state) {
  check_pair(initial, final_state);
  const int n = initial.size();
  std::vector<Factor> factors;
  factors.reserve(static_cast<std::size_t>(n));
  // Spin i is visited after spins i+1..n have reached their final values and
  // before spins 1..i-1 have moved.
  int up_before = 0;
  int up_after = final_state.up_count();
  for (int i = 1; i <= n; ++i) {
    up_after -= final_state.up(i) ? 1 : 0;
    const int k = n - up_before - up_after;
    factors.push_back({k, initial.up(i) == final_state.up(i) ? FactorKind::stay : FactorKind::flip});
    up_before += initial.up(i) ? 1 : 0;
  }
  return Monomial(std::move(factors));
}

double transition_probability(const SpinConfig& initial, const SpinConfig& final_state,
                              const ModelParams& params) {
  check_pair(initial, final_state);
  check_params(initial, params);
  if (params.g == 0.0) return initial == final_state ? 1.0 : 0.0;
  return transition_monomial(initial, final_state).value(params);
}

bool verify_complement_symmetry(const SpinConfig& initial, const SpinConfig& final_state) {
  const Monomial direct = transition_monomial(initial, final_state);
  const Monomial mirrored = transition_monomial(initial.complement(), final_state.complement());
  return direct.reflected(initial.size()) == mirrored;
}

Distribution polarization_marginal(const SpinConfig& initial, const ModelParams& params,
                                   std::optional<int> max_spins) {
  check_params(initial, params);
  const int n = params.spin_count;
  const int limit = max_spins.value_or(bruteforce_spin_limit(20));
  if (n > limit || n > 62)
    throw std::length_error("polarization_marginal: N_s = " + std::to_string(n) +
                            " exceeds the enumeration limit " + std::to_string(limit));
  std::vector<LogAccumulator> by_nu(static_cast<std::size_t>(n) + 1);
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t code = 0; code < count; ++code) {
    const SpinConfig f = SpinConfig::from_index(code, n);
    const double lp = params.g == 0.0 ? (f == initial ? 0.0 : kNegInf)
                                      : transition_monomial(initial, f).log_value(params);
    by_nu[static_cast<std::size_t>(f.down_count())].add(lp);
  }
  std::vector<double> logs;
  logs.reserve(by_nu.size());
  for (const auto& acc : by_nu) logs.push_back(acc.value());
  return Distribution(std::move(logs));
}

Distribution forward_distribution(const ModelParams& params) {
  params.validate();
  const int n = params.spin_count;
  if (params.g == 0.0) return Distribution::point_mass(static_cast<std::size_t>(n) + 1, 0, Process::forward);
  const QParam x = params.x();
  const double lx = x.log();
  const double first = (params.n_bosons + 1) * lx;
  std::vector<double> logs(static_cast<std::size_t>(n) + 1);
  for (int nu = 0; nu <= n; ++nu) {
    logs[static_cast<std::size_t>(nu)] =
        log_q_binomial(n, nu, x) + first * (n - nu) + log_q_pochhammer(first, lx, nu);
  }
  return Distribution(std::move(logs), Process::forward);
}

Distribution inverse_distribution(const ModelParams& params) {
  params.validate();
  const int n = params.spin_count;
  if (params.g == 0.0) return Distribution::point_mass(static_cast<std::size_t>(n) + 1, static_cast<std::size_t>(n), Process::inverse);
  const QParam x = params.x();
  const double lx = x.log();
  const int nb = params.n_bosons;
  std::vector<double> logs(static_cast<std::size_t>(n) + 1);
  for (int nu = 0; nu <= n; ++nu) {
    logs[static_cast<std::size_t>(nu)] = log_q_binomial(n, nu, x) + static_cast<double>(nb + nu) * nu * lx +
                                         log_q_pochhammer((nb + nu + 1) * lx, lx, n - nu);
  }
  return Distribution(std::move(logs), Process::inverse);
}

Distribution forward_distribution_rawsum(const ModelParams& params, std::optional<int> max_spins) {
  polarised_limit(params, max_spins);
  const int n = params.spin_count;
  std::vector<double> probs(static_cast<std::size_t>(n) + 1);
  for (int nu = 0; nu <= n; ++nu) {
    double prefactor = 1.0;
    for (int k = 1; k <= nu; ++k) prefactor *= flip_probability(params, k);
    std::vector<double> stay;
    for (int r = 1; r <= nu + 1; ++r) stay.push_back(stay_probability(params, r));
    probs[static_cast<std::size_t>(nu)] = prefactor * composition_sum(stay, n - nu);
  }
  return Distribution::from_linear(probs, Process::forward);
}

Distribution inverse_distribution_rawsum(const ModelParams& params, std::optional<int> max_spins) {
  polarised_limit(params, max_spins);
  const int n = params.spin_count;
  std::vector<double> probs(static_cast<std::size_t>(n) + 1);
  for (int nu = 0; nu <= n; ++nu) {
    double prefactor = 1.0;
    for (int k = nu + 1; k <= n; ++k) prefactor *= flip_probability(params, k);
    std::vector<double> stay;
    for (int r = nu; r <= n; ++r) stay.push_back(stay_probability(params, r));
    probs[static_cast<std::size_t>(nu)] = prefactor * composition_sum(stay, nu);
  }
  return Distribution::from_linear(probs, Process::inverse);
}

double partition_function(int bosons, int levels, QParam x) {
  if (bosons < 0 || levels < 1) throw std::domain_error("partition_function: requires N >= 0 and n >= 1");
  double z = 1.0;
  for (int k = 1; k <= bosons; ++k) {
    z *= x.is_unity() ? static_cast<double>(k + levels - 1) / k
                      : x.one_minus_pow(k + levels - 1) / x.one_minus_pow(k);
  }
  return z;
}

double log_partition_function(int bosons, int levels, QParam x) {
  if (bosons < 0 || levels < 1) throw std::domain_error("log_partition_function: requires N >= 0 and n >= 1");
  double lz = 0.0;
  for (int k = 1; k <= bosons; ++k) {
    lz += x.is_unity() ? std::log(static_cast<double>(k + levels - 1) / k)
                       : x.log_one_minus_pow(k + levels - 1) - x.log_one_minus_pow(k);
  }
  return lz;
}

double partition_function_bruteforce(int bosons, int levels, QParam x) {
  if (bosons < 0 || levels < 1) throw std::domain_error("partition_function_bruteforce: requires N >= 0 and n >= 1");
  // Level r (0-based) has energy r; weight x^r per boson.
  std::vector<double> weight(static_cast<std::size_t>(levels));
  for (int r = 0; r < levels; ++r) weight[static_cast<std::size_t>(r)] = std::exp(r * x.log());
  return composition_sum(weight, bosons);
}

}  // namespace dtcm
