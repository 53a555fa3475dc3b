#include "dtcm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numeric>

namespace dtcm {

SectorBasis::SectorBasis(int excitations, std::vector<double> splittings)
    : excitations_(excitations), splittings_(std::move(splittings)) {
  const int n = spin_count();
  if (n < 1 || n > 20) throw std::invalid_argument("SectorBasis: spin count must be in [1, 20]");
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t code = 0; code < count; ++code) {
    SpinConfig c = SpinConfig::from_index(code, n);
    if (excitations_ - c.up_count() >= 0) states_.push_back(std::move(c));
  }
  check();
}

SectorBasis::SectorBasis(int excitations, std::vector<double> splittings, std::vector<SpinConfig> states)
    : excitations_(excitations), splittings_(std::move(splittings)), states_(std::move(states)) {
  check();
}

void SectorBasis::check() {
  if (excitations_ < 0) throw std::invalid_argument("SectorBasis: excitation number must be >= 0");
  if (splittings_.empty()) throw std::invalid_argument("SectorBasis: no spins");
  for (std::size_t i = 1; i < splittings_.size(); ++i) {
    if (!(splittings_[i - 1] > splittings_[i]))
      throw std::invalid_argument("SectorBasis: splittings must be strictly decreasing");
  }
  if (states_.empty()) throw std::invalid_argument("SectorBasis: empty sector");
  lookup_.clear();
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const auto& s = states_[i];
    if (s.size() != spin_count()) throw std::invalid_argument("SectorBasis: state length does not match spin count");
    if (excitations_ - s.up_count() < 0) throw std::invalid_argument("SectorBasis: state has negative boson number");
    if (!lookup_.emplace(s, static_cast<int>(i)).second) throw std::invalid_argument("SectorBasis: duplicate state");
  }
}

SectorBasis SectorBasis::for_params(const ModelParams& params, std::vector<double> splittings) {
  params.validate();
  if (static_cast<int>(splittings.size()) != params.spin_count)
    throw std::invalid_argument("SectorBasis: need one splitting per spin");
  return SectorBasis(params.n_bosons + params.spin_count, std::move(splittings));
}

std::vector<double> SectorBasis::equally_spaced(int spin_count, double spacing) {
  if (spin_count < 1 || !(spacing > 0.0)) throw std::invalid_argument("equally_spaced: bad arguments");
  std::vector<double> e(static_cast<std::size_t>(spin_count));
  for (int i = 0; i < spin_count; ++i) e[static_cast<std::size_t>(i)] = spacing * (0.5 * (spin_count - 1) - i);
  return e;
}

int SectorBasis::bosons(int i) const { return excitations_ - state(i).up_count(); }

int SectorBasis::find(const SpinConfig& config) const {
  auto it = lookup_.find(config);
  return it == lookup_.end() ? -1 : it->second;
}

Eigen::MatrixXcd SectorHamiltonian::at(double t) const {
  Eigen::MatrixXcd h = coupling.cast<std::complex<double>>();
  h.diagonal() += (offset - t * slope).cast<std::complex<double>>();
  return h;
}

SectorHamiltonian sector_hamiltonian(const SectorBasis& basis, const ModelParams& params) {
  params.validate();
  if (basis.spin_count() != params.spin_count)
    throw std::invalid_argument("sector_hamiltonian: basis and params disagree on N_s");
  if (basis.excitations() != params.n_bosons + params.spin_count)
    throw std::invalid_argument("sector_hamiltonian: basis excitation number differs from N_B + N_s");
  const int dim = basis.dimension();
  const int n = basis.spin_count();
  SectorHamiltonian h;
  h.coupling = Eigen::MatrixXd::Zero(dim, dim);
  h.offset = Eigen::VectorXd::Zero(dim);
  h.slope = Eigen::VectorXd::Zero(dim);
  for (int a = 0; a < dim; ++a) {
    const SpinConfig& s = basis.state(a);
    for (int i = 1; i <= n; ++i) {
      if (!s.up(i)) continue;
      h.offset(a) += basis.splittings()[static_cast<std::size_t>(i - 1)];
      h.slope(a) += 1.0;
      // a^+ s_i^- : spin i down, one more boson, amplitude sqrt(n + 1)
      const int b = basis.find(s.with_flipped(i));
      if (b < 0) continue;
      const double element = params.g * std::sqrt(static_cast<double>(basis.bosons(b)));
      h.coupling(b, a) = element;
      h.coupling(a, b) = element;
    }
  }
  return h;
}

Eigen::MatrixXcd build_hamiltonian(const SectorBasis& basis, const ModelParams& params, double t) {
  Eigen::MatrixXcd h = sector_hamiltonian(basis, params).at(t);
  if ((h - h.adjoint()).norm() != 0.0)
    throw std::logic_error("build_hamiltonian: matrix is not Hermitian");
  return h;
}

EvolutionConfig EvolutionConfig::symmetric(double half_width) {
  EvolutionConfig c;
  c.t_start = -half_width;
  c.t_end = half_width;
  return c;
}

void EvolutionConfig::validate() const {
  if (!(t_start < 0.0 && 0.0 < t_end)) throw std::invalid_argument("EvolutionConfig: need t_start < 0 < t_end");
  if (!(rtol > 0.0) || !(atol > 0.0)) throw std::invalid_argument("EvolutionConfig: tolerances must be > 0");
  if (!(max_norm_drift > 0.0) || max_steps < 1) throw std::invalid_argument("EvolutionConfig: bad limits");
}

double default_window(const SectorBasis& basis) {
  const auto& e = basis.splittings();
  const double spread = e.front() - e.back();
  const double reach = std::max(std::abs(e.front()), std::abs(e.back()));
  return std::max(100.0 / std::max(1.0, spread), 10.0 * reach);
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

using Vec = Eigen::VectorXd;

// y = [Re psi; Im psi] in the bare frame, [Re c; Im c] in the rotating frame.
class Rhs {
 public:
  Rhs(const SectorHamiltonian& h, Frame frame)
      : h_(h), frame_(frame), dim_(static_cast<int>(h.offset.size())), work_(dim_), rot_(dim_), re_(dim_), im_(dim_) {}

  void operator()(double t, const Vec& y, Vec& dy) {
    const auto re = y.head(dim_);
    const auto im = y.tail(dim_);
    if (frame_ == Frame::bare) {
      work_ = h_.offset - t * h_.slope;
      dy.head(dim_).noalias() = h_.coupling * im;
      dy.head(dim_) += work_.cwiseProduct(im);
      dy.tail(dim_).noalias() = -(h_.coupling * re);
      dy.tail(dim_) -= work_.cwiseProduct(re);
      return;
    }
    // psi = e^{-i phi} c with phi = offset t - slope t^2/2, so
    // c' = -i e^{i phi} V e^{-i phi} c.
    work_ = h_.offset * t - h_.slope * (0.5 * t * t);
    for (int m = 0; m < dim_; ++m) rot_(m) = std::polar(1.0, -work_(m));
    // psi = rot * c, split into real and imaginary parts
    re_ = rot_.real().cwiseProduct(re) - rot_.imag().cwiseProduct(im);
    im_ = rot_.real().cwiseProduct(im) + rot_.imag().cwiseProduct(re);
    // -i V psi
    work_.noalias() = h_.coupling * im_;
    im_ = -(h_.coupling * re_);
    re_ = work_;
    // c' = conj(rot) * (-i V psi)
    dy.head(dim_) = rot_.real().cwiseProduct(re_) + rot_.imag().cwiseProduct(im_);
    dy.tail(dim_) = rot_.real().cwiseProduct(im_) - rot_.imag().cwiseProduct(re_);
  }

 private:
  const SectorHamiltonian& h_;
  Frame frame_;
  int dim_;
  Vec work_;
  Eigen::VectorXcd rot_;
  Vec re_, im_;
};

}  // namespace

EvolutionResult evolve(const SectorBasis& basis, const ModelParams& params, const EvolutionConfig& config,
                       const SpinConfig& initial) {
  config.validate();
  const int start = basis.find(initial);
  if (start < 0) throw std::invalid_argument("evolve: initial state is not in the sector basis");
  // Integrate in canonical order so that the result does not depend on how the
  // caller enumerated the basis, down to the last bit.
  if (!std::is_sorted(basis.states().begin(), basis.states().end())) {
    std::vector<SpinConfig> sorted = basis.states();
    std::sort(sorted.begin(), sorted.end());
    const SectorBasis canonical(basis.excitations(), basis.splittings(), sorted);
    EvolutionResult r = evolve(canonical, params, config, initial);
    std::vector<double> mapped(r.probabilities.size());
    for (int i = 0; i < basis.dimension(); ++i)
      mapped[static_cast<std::size_t>(i)] = r.probabilities[static_cast<std::size_t>(canonical.find(basis.state(i)))];
    r.probabilities = std::move(mapped);
    return r;
  }
  const SectorHamiltonian h = sector_hamiltonian(basis, params);
  const int dim = basis.dimension();
  Rhs rhs(h, config.frame);

  Vec y = Vec::Zero(2 * dim);
  y(start) = 1.0;
  EvolutionResult result;

  double t = config.t_start;
  const double t_end = config.t_end;
  const double max_rate = h.coupling.cwiseAbs().rowwise().sum().maxCoeff() +
                          (h.offset.cwiseAbs() + std::max(std::abs(t), t_end) * h.slope).maxCoeff();
  double step = std::min(1e-2, 0.1 / std::max(1.0, max_rate));

  Vec k1(2 * dim), k2(2 * dim), k3(2 * dim), k4(2 * dim), k5(2 * dim), k6(2 * dim), k7(2 * dim);
  Vec tmp(2 * dim), y_new(2 * dim), err(2 * dim);
  rhs(t, y, k1);
  double err_prev = 1e-4;
  while (t < t_end) {
    if (result.steps + result.rejected >= config.max_steps)
      throw NumericalError("evolve: step budget exhausted", t);
    const bool last = t + step >= t_end;
    const double hstep = last ? t_end - t : step;
    if (hstep < 1e-14 * std::max(1.0, std::abs(t))) throw NumericalError("evolve: step size underflow", t);

    tmp = y + hstep * (a21 * k1);
    rhs(t + c2 * hstep, tmp, k2);
    tmp = y + hstep * (a31 * k1 + a32 * k2);
    rhs(t + c3 * hstep, tmp, k3);
    tmp = y + hstep * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * hstep, tmp, k4);
    tmp = y + hstep * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * hstep, tmp, k5);
    tmp = y + hstep * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + hstep, tmp, k6);
    y_new = y + hstep * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + hstep, y_new, k7);
    err = hstep * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double sum = 0.0;
    for (int i = 0; i < 2 * dim; ++i) {
      const double scale = config.atol + config.rtol * std::max(std::abs(y(i)), std::abs(y_new(i)));
      sum += (err(i) / scale) * (err(i) / scale);
    }
    const double err_norm = std::sqrt(sum / (2 * dim));
    if (std::isnan(err_norm)) throw NumericalError("evolve: non-finite state", t);

    if (err_norm <= 1.0) {
      t = last ? t_end : t + hstep;
      y.swap(y_new);
      k1.swap(k7);
      ++result.steps;
      // PI controller
      const double factor = 0.9 * std::pow(std::max(err_norm, 1e-10), -0.7 / 5) * std::pow(err_prev, 0.4 / 5);
      step = hstep * std::clamp(factor, 0.2, 5.0);
      err_prev = std::max(err_norm, 1e-4);
    } else {
      ++result.rejected;
      step = hstep * std::max(0.2, 0.9 * std::pow(err_norm, -1.0 / 5));
    }
  }

  result.probabilities.resize(static_cast<std::size_t>(dim));
  double norm = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double p = y(i) * y(i) + y(dim + i) * y(dim + i);
    result.probabilities[static_cast<std::size_t>(i)] = p;
    norm += p;
  }
  result.norm_drift = norm - 1.0;
  if (std::abs(result.norm_drift) > config.max_norm_drift) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "evolve: norm drift %.3e exceeds limit %.3e", result.norm_drift, config.max_norm_drift);
    throw NumericalError(buf, t);
  }
  return result;
}

ConvergenceReport converge_window(const SectorBasis& basis, const ModelParams& params, const SpinConfig& initial,
                                  const std::vector<double>& schedule, double tolerance, EvolutionConfig base) {
  if (schedule.empty()) throw std::invalid_argument("converge_window: empty schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0) || (i > 0 && !(schedule[i] > schedule[i - 1])))
      throw std::invalid_argument("converge_window: schedule must be positive and strictly increasing");
  }
  ConvergenceReport report;
  for (double T : schedule) {
    EvolutionConfig cfg = base;
    cfg.t_start = -T;
    cfg.t_end = T;
    report.windows.push_back(T);
    report.probabilities.push_back(evolve(basis, params, cfg, initial).probabilities);
  }
  const auto& last = report.probabilities.back();
  report.extrapolated = last;
  if (schedule.size() >= 2) {
    const auto& prev = report.probabilities[report.probabilities.size() - 2];
    const double t1 = schedule[schedule.size() - 2];
    const double t2 = schedule.back();
    for (std::size_t i = 0; i < last.size(); ++i) {
      // P(T) = P_inf + c/T through the two largest windows.
      report.extrapolated[i] = (t2 * last[i] - t1 * prev[i]) / (t2 - t1);
      report.last_change = std::max(report.last_change, std::abs(last[i] - prev[i]));
    }
    report.converged = report.last_change <= tolerance;
  } else {
    report.converged = false;
  }
  return report;
}

}  // namespace dtcm
