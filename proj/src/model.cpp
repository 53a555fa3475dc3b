#include "dtcm/model.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace dtcm {

SpinConfig::SpinConfig(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw std::invalid_argument("SpinConfig: bits must be 0 or 1");
  }
}

SpinConfig SpinConfig::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("SpinConfig: empty bit string");
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw std::invalid_argument("SpinConfig: expected only '0'/'1' in \"" + std::string(text) + "\"");
    bits.push_back(c == '1' ? 1 : 0);
  }
  return SpinConfig(std::move(bits));
}

SpinConfig SpinConfig::all_up(int spin_count) {
  return SpinConfig(std::vector<std::uint8_t>(static_cast<std::size_t>(spin_count), 1));
}

SpinConfig SpinConfig::all_down(int spin_count) {
  return SpinConfig(std::vector<std::uint8_t>(static_cast<std::size_t>(spin_count), 0));
}

SpinConfig SpinConfig::from_index(std::uint64_t code, int spin_count) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(spin_count));
  for (int i = 0; i < spin_count; ++i) bits[static_cast<std::size_t>(i)] = (code >> (spin_count - 1 - i)) & 1u;
  return SpinConfig(std::move(bits));
}

int SpinConfig::up_count() const { return std::accumulate(bits_.begin(), bits_.end(), 0); }

SpinConfig SpinConfig::complement() const {
  std::vector<std::uint8_t> bits(bits_.size());
  for (std::size_t i = 0; i < bits_.size(); ++i) bits[i] = 1 - bits_[i];
  return SpinConfig(std::move(bits));
}

SpinConfig SpinConfig::with_flipped(int spin) const {
  auto bits = bits_;
  auto& b = bits.at(static_cast<std::size_t>(spin - 1));
  b = 1 - b;
  return SpinConfig(std::move(bits));
}

std::uint64_t SpinConfig::index() const {
  std::uint64_t code = 0;
  for (auto b : bits_) code = (code << 1) | b;
  return code;
}

std::string SpinConfig::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

void ModelParams::validate() const {
  if (!std::isfinite(g) || g < 0.0) throw std::invalid_argument("ModelParams: g must be finite and >= 0");
  if (n_bosons < 0) throw std::invalid_argument("ModelParams: N_B must be >= 0");
  if (spin_count < 1) throw std::invalid_argument("ModelParams: N_s must be >= 1");
}

double ModelParams::log_stay(int k) const { return -kTwoPi * g * g * (n_bosons + k); }

double ModelParams::log_flip(int k) const { return QParam::from_log(log_stay(k)).log_one_minus_pow(1.0); }

int bruteforce_spin_limit(int fallback) {
  const char* env = std::getenv("DTCM_MAX_BRUTEFORCE_NS");
  if (env == nullptr) return fallback;
  int value = 0;
  const std::string_view text(env);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value <= 0)
    throw std::invalid_argument("DTCM_MAX_BRUTEFORCE_NS must be a positive integer");
  return value;
}

}  // namespace dtcm
