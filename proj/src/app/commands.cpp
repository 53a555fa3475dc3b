#include "dtcm/app/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>

#include "dtcm/asymptotics.hpp"
#include "dtcm/exact.hpp"
#include "dtcm/oracle.hpp"

#ifndef DTCM_VERSION
#define DTCM_VERSION "0.0.0"
#endif

namespace dtcm::app {

const char* to_string(Command c) {
  switch (c) {
    case Command::prob: return "prob";
    case Command::dist: return "dist";
    case Command::mean: return "mean";
    case Command::sweep: return "sweep";
    case Command::oracle: return "oracle";
  }
  return "?";
}

const char* to_string(Format f) {
  switch (f) {
    case Format::text: return "text";
    case Format::csv: return "csv";
    case Format::json: return "json";
  }
  return "?";
}

namespace {

double parse_double(std::string_view text, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
    throw std::invalid_argument(std::string(what) + ": cannot parse '" + std::string(text) + "'");
  return v;
}

std::string join(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) s += ',';
    s += format_number(values[i]);
  }
  return s;
}

std::string join(const std::vector<int>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) s += ',';
    s += std::to_string(values[i]);
  }
  return s;
}

void require_increasing(const std::vector<double>& values, const char* what) {
  if (values.empty()) throw std::invalid_argument(std::string(what) + ": no values");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw std::invalid_argument(std::string(what) + ": values must be finite");
    if (i > 0 && !(values[i] > values[i - 1]))
      throw std::invalid_argument(std::string(what) + ": values must be strictly increasing");
  }
}

// Runs body(i) for i in [0, n) on up to `threads` workers. Results are written
// by index, so the order of execution never shows in the output. The
// exception from the smallest failing index is rethrown.
template <class Body>
void parallel_for(std::size_t n, int threads, Body body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(n, threads > 0 ? static_cast<std::size_t>(threads) : hw);
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

ModelParams model(const RunSpec& spec, int spin_count, double g) {
  ModelParams p{g, spec.n_bosons, spin_count};
  p.validate();
  return p;
}

bool approximations_apply(const ModelParams& p) { return p.n_bosons == 0 && p.g > 0.0; }

Cell maybe(bool ok, double value) { return ok ? Cell{value} : Cell{}; }

std::string key_for(double g) { return "g=" + format_number(g); }

Report prob_report(const RunSpec& spec) {
  const int ns = spec.spin_counts.at(0);
  const auto initial = SpinConfig::parse(spec.initial);
  const auto final_state = SpinConfig::parse(spec.final_state);
  if (initial.size() != ns || final_state.size() != ns)
    throw std::invalid_argument("prob: --i and --f must have N_s bits");
  const Monomial m = transition_monomial(initial, final_state);
  Report r;
  r.table.columns = {"g", "initial", "final", "monomial", "probability"};
  for (double g : spec.couplings) {
    const double v = transition_probability(initial, final_state, model(spec, ns, g));
    r.table.add({g, spec.initial, spec.final_state, m.to_string(), v});
  }
  return r;
}

Report dist_report(const RunSpec& spec) {
  const int ns = spec.spin_counts.at(0);
  const bool forward = spec.process == Process::forward;
  Report r;
  if (forward) {
    r.table.columns = {"g", "nu", "f", "exact", "continuous", "gaussian", "euler"};
  } else {
    r.table.columns = {"g", "nu", "exact", "continuous", "gaussian", "largeg"};
  }
  const std::size_t ng = spec.couplings.size();
  std::vector<std::vector<std::vector<Cell>>> blocks(ng);
  std::vector<std::string> sums(ng);
  parallel_for(ng, spec.threads, [&](std::size_t k) {
    const double g = spec.couplings[k];
    const ModelParams p = model(spec, ns, g);
    const Distribution exact = forward ? forward_distribution(p) : inverse_distribution(p);
    const bool approx = approximations_apply(p);
    std::optional<ContinuousCurve> curve;
    GaussianSummary gauss;
    std::optional<EulerLimit> euler;
    if (approx) {
      curve = forward ? forward_continuous(p) : inverse_continuous(p);
      gauss = forward ? forward_gaussian(p) : inverse_gaussian(p);
      if (forward) euler = forward_largeg_euler(p, spec.tol);
    }
    double s_exact = 0.0, s_cont = 0.0, s_gauss = 0.0, s_large = 0.0;
    for (int nu = 0; nu <= ns; ++nu) {
      const auto idx = static_cast<std::size_t>(nu);
      const double pe = exact.prob(idx);
      s_exact += pe;
      double pc = 0.0, pg = 0.0, pl = 0.0;
      if (approx) {
        pc = curve->density(nu);
        pg = gauss.density(nu);
        pl = forward ? euler->by_f.prob(static_cast<std::size_t>(ns - nu)) : inverse_largeg(p, nu, spec.tol);
        s_cont += pc;
        s_gauss += pg;
        s_large += pl;
      }
      if (forward) {
        blocks[k].push_back({g, static_cast<long long>(nu), static_cast<long long>(ns - nu), pe, maybe(approx, pc),
                             maybe(approx, pg), maybe(approx, pl)});
      } else {
        blocks[k].push_back({g, static_cast<long long>(nu), pe, maybe(approx, pc), maybe(approx, pg), maybe(approx, pl)});
      }
    }
    std::string s = "exact=" + format_number(s_exact);
    if (approx) {
      s += " continuous=" + format_number(s_cont) + " gaussian=" + format_number(s_gauss) +
           (forward ? " euler=" : " largeg=") + format_number(s_large);
    }
    sums[k] = std::move(s);
  });
  for (std::size_t k = 0; k < ng; ++k) {
    for (auto& row : blocks[k]) r.table.add(std::move(row));
    r.summary.emplace_back("sums " + key_for(spec.couplings[k]), sums[k]);
  }
  return r;
}

double inverse_largeg_mean(const ModelParams& p, double tol) {
  std::vector<double> logs(static_cast<std::size_t>(p.spin_count) + 1);
  for (int nu = 0; nu <= p.spin_count; ++nu) logs[static_cast<std::size_t>(nu)] = log_inverse_largeg(p, nu, tol);
  return Distribution(std::move(logs)).mean();
}

Report mean_report(const RunSpec& spec) {
  const int ns = spec.spin_counts.at(0);
  const bool forward = spec.process == Process::forward;
  Report r;
  if (forward) {
    r.table.columns = {"g2", "g", "n_b_exact", "gaussian", "euler", "altland", "itin", "strong_coupling"};
  } else {
    r.table.columns = {"g2", "g", "n_b_exact", "gaussian", "largeg", "linear", "strong_coupling"};
  }
  const std::size_t ng = spec.couplings.size();
  // print the grid values themselves rather than g*g
  std::vector<double> g2;
  if (spec.g2_grid) g2 = parse_g2_grid(*spec.g2_grid);
  if (g2.size() != ng) {
    g2.clear();
    for (double g : spec.couplings) g2.push_back(g * g);
  }
  std::vector<std::vector<Cell>> rows(ng);
  parallel_for(ng, spec.threads, [&](std::size_t k) {
    const double g = spec.couplings[k];
    const ModelParams p = model(spec, ns, g);
    const Distribution exact = forward ? forward_distribution(p) : inverse_distribution(p);
    const double n_b = spec.n_bosons + exact.mean();
    const bool approx = approximations_apply(p);
    const bool strong = strong_coupling(p);
    if (forward) {
      rows[k] = {g2[k],
                 g,
                 n_b,
                 approx ? Cell{forward_gaussian(p).mean} : Cell{},
                 approx ? Cell{forward_largeg_euler(p, spec.tol).boson_number} : Cell{},
                 p.n_bosons == 0 ? Cell{comparison_altland_forward(p).n_b} : Cell{},
                 approx ? Cell{comparison_itin_forward(p).n_b} : Cell{},
                 strong};
    } else {
      rows[k] = {g2[k],
                 g,
                 n_b,
                 approx ? Cell{inverse_gaussian(p).mean} : Cell{},
                 approx ? Cell{inverse_largeg_mean(p, spec.tol)} : Cell{},
                 approx ? Cell{comparison_inverse_linear(p).n_b} : Cell{},
                 strong};
    }
  });
  for (auto& row : rows) r.table.add(std::move(row));
  r.summary.emplace_back("rows", std::to_string(ng));
  return r;
}

Report sweep_report(const RunSpec& spec) {
  Report r;
  r.table.columns = {"ns", "g", "mean", "variance", "mode", "p_mode", "total"};
  const std::size_t ng = spec.couplings.size();
  const std::size_t n = spec.spin_counts.size() * ng;
  std::vector<std::vector<Cell>> rows(n);
  parallel_for(n, spec.threads, [&](std::size_t k) {
    const int ns = spec.spin_counts[k / ng];
    const double g = spec.couplings[k % ng];
    const ModelParams p = model(spec, ns, g);
    const Distribution d = spec.process == Process::forward ? forward_distribution(p) : inverse_distribution(p);
    const std::size_t mode = d.mode();
    rows[k] = {static_cast<long long>(ns), g, d.mean(), d.variance(), static_cast<long long>(mode), d.prob(mode), d.total()};
  });
  for (auto& row : rows) r.table.add(std::move(row));
  r.summary.emplace_back("rows", std::to_string(n));
  return r;
}

std::string window_column(double t) { return "p_T" + format_number(t); }

Report oracle_report(const RunSpec& spec) {
  const int ns = spec.spin_counts.at(0);
  const ModelParams p0 = model(spec, ns, spec.couplings.front());
  const std::vector<double> eps = spec.splittings.empty() ? SectorBasis::equally_spaced(ns) : spec.splittings;
  const SectorBasis basis = SectorBasis::for_params(p0, eps);
  const SpinConfig initial = spec.initial.empty() ? SpinConfig::all_up(ns) : SpinConfig::parse(spec.initial);
  if (basis.find(initial) < 0) throw std::invalid_argument("oracle: --i is not in the sector of the all-up state");
  std::vector<double> windows = spec.windows;
  if (windows.empty()) {
    const double w = default_window(basis);
    windows = {w, 2 * w, 4 * w};
  }
  require_increasing(windows, "--T-schedule");

  Report r;
  r.table.columns = {"g", "final", "bosons", "exact"};
  for (double t : windows) r.table.columns.push_back(window_column(t));
  r.table.columns.insert(r.table.columns.end(), {"extrapolated", "abs_diff"});

  const std::size_t ng = spec.couplings.size();
  std::vector<ConvergenceReport> reports(ng);
  parallel_for(ng, spec.threads, [&](std::size_t k) {
    reports[k] = converge_window(basis, model(spec, ns, spec.couplings[k]), initial, windows, spec.tol);
  });

  double worst = 0.0;
  for (std::size_t k = 0; k < ng; ++k) {
    const double g = spec.couplings[k];
    const ModelParams p = model(spec, ns, g);
    double max_diff = 0.0;
    for (int i = 0; i < basis.dimension(); ++i) {
      const auto idx = static_cast<std::size_t>(i);
      const double exact = transition_probability(initial, basis.state(i), p);
      std::vector<Cell> row{g, basis.state(i).to_string(), static_cast<long long>(basis.bosons(i)), exact};
      for (const auto& probs : reports[k].probabilities) row.emplace_back(probs[idx]);
      const double diff = std::abs(reports[k].extrapolated[idx] - exact);
      max_diff = std::max(max_diff, diff);
      row.emplace_back(reports[k].extrapolated[idx]);
      row.emplace_back(diff);
      r.table.add(std::move(row));
    }
    worst = std::max(worst, max_diff);
    r.summary.emplace_back(key_for(g), "max_abs_diff=" + format_number(max_diff) +
                                           " last_change=" + format_number(reports[k].last_change) +
                                           " converged=" + (reports[k].converged ? "true" : "false"));
  }
  const bool pass = worst <= spec.tol;
  r.summary.emplace_back("pass", pass ? "true" : "false");
  if (!pass) throw ToleranceFailure{std::move(r), "oracle: max |extrapolated - exact| = " + format_number(worst) +
                                                      " exceeds tolerance " + format_number(spec.tol)};
  return r;
}

void validate(const RunSpec& spec) {
  if (spec.spin_counts.empty()) throw std::invalid_argument("spin count is required (--ns or --s)");
  for (int ns : spec.spin_counts) {
    if (ns < 1) throw std::invalid_argument("--ns must be >= 1");
  }
  if (spec.command != Command::sweep && spec.spin_counts.size() != 1)
    throw std::invalid_argument("only sweep accepts several spin counts");
  if (spec.n_bosons < 0) throw std::invalid_argument("--nb must be >= 0");
  require_increasing(spec.couplings, "--g");
  if (spec.couplings.front() < 0.0) throw std::invalid_argument("--g must be >= 0");
  if (!(spec.tol > 0.0)) throw std::invalid_argument("--tol must be > 0");
  if (spec.format == Format::text && spec.command != Command::prob)
    throw std::invalid_argument("text format is only available for prob");
  if (spec.command == Command::sweep) {
    std::vector<double> s(spec.spin_counts.begin(), spec.spin_counts.end());
    require_increasing(s, "--ns");
  }
}

}  // namespace

std::vector<double> parse_g2_grid(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ':') {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (parts.size() != 3) throw std::invalid_argument("--g2-grid: expected a:b:step");
  const double a = parse_double(parts[0], "--g2-grid");
  const double b = parse_double(parts[1], "--g2-grid");
  const double step = parse_double(parts[2], "--g2-grid");
  if (a < 0.0 || b < a || !(step > 0.0)) throw std::invalid_argument("--g2-grid: need 0 <= a <= b and step > 0");
  const double span = (b - a) / step;
  if (span > 1e6) throw std::invalid_argument("--g2-grid: more than a million points");
  // tolerate b landing a rounding error short of a whole number of steps
  const auto n = static_cast<long>(std::floor(span + 1e-9));
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i <= n; ++i) values.push_back(a + static_cast<double>(i) * step);
  return values;
}

int parse_spin(std::string_view text) {
  const auto slash = text.find('/');
  double twice = 0.0;
  if (slash != std::string_view::npos) {
    const double num = parse_double(text.substr(0, slash), "--s");
    const double den = parse_double(text.substr(slash + 1), "--s");
    if (den != 1.0 && den != 2.0) throw std::invalid_argument("--s: denominator must be 1 or 2");
    twice = 2.0 * num / den;
  } else {
    twice = 2.0 * parse_double(text, "--s");
  }
  if (twice != std::round(twice) || twice < 1.0 || twice > 1e7)
    throw std::invalid_argument("--s: 2S must be a positive integer");
  return static_cast<int>(twice);
}

namespace {

struct Preset {
  const char* name;
  Command command;
  Process process;
  int spin_count;
  std::vector<double> couplings;
  const char* g2_grid;  // used instead of couplings when set
};

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"dist-forward-small", Command::dist, Process::forward, 15, {0.1, 0.2, 0.3}, nullptr},
      {"dist-forward-large", Command::dist, Process::forward, 150, {0.02, 0.05, 0.1}, nullptr},
      {"dist-inverse-moderate", Command::dist, Process::inverse, 20, {0.1, 0.2, 0.3}, nullptr},
      {"dist-inverse-large", Command::dist, Process::inverse, 400, {0.05, 0.1, 0.15}, nullptr},
      {"mean-forward", Command::mean, Process::forward, 400, {}, "0:0.25:0.0025"},
      {"mean-forward-weak", Command::mean, Process::forward, 400, {}, "0:0.00001:0.0000001"},
      {"mean-inverse", Command::mean, Process::inverse, 400, {}, "0:0.25:0.0025"},
      {"mean-inverse-strong", Command::mean, Process::inverse, 400, {}, "0.25:1:0.0125"},
  };
  return table;
}

std::string normalise_grid(std::string_view text) {
  const auto values = parse_g2_grid(text);  // validates
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ':') {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return format_number(parse_double(parts[0], "--g2-grid")) + ':' + format_number(parse_double(parts[1], "--g2-grid")) +
         ':' + format_number(parse_double(parts[2], "--g2-grid"));
}

std::vector<double> couplings_from_grid(std::string_view text) {
  std::vector<double> g;
  for (double g2 : parse_g2_grid(text)) g.push_back(std::sqrt(g2));
  return g;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : presets()) names.emplace_back(p.name);
  return names;
}

RunSpec preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (name != p.name) continue;
    RunSpec spec;
    spec.command = p.command;
    spec.process = p.process;
    spec.spin_counts = {p.spin_count};
    if (p.g2_grid != nullptr) {
      spec.g2_grid = normalise_grid(p.g2_grid);
      spec.couplings = couplings_from_grid(*spec.g2_grid);
    } else {
      spec.couplings = p.couplings;
    }
    return spec;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

KeyValues describe(const RunSpec& spec) {
  KeyValues kv;
  kv.emplace_back("dtcm", DTCM_VERSION);
  kv.emplace_back("command", to_string(spec.command));
  if (spec.command == Command::dist || spec.command == Command::mean || spec.command == Command::sweep)
    kv.emplace_back("process", to_string(spec.process));
  kv.emplace_back("ns", join(spec.spin_counts));
  kv.emplace_back("nb", std::to_string(spec.n_bosons));
  if (spec.g2_grid) {
    kv.emplace_back("g2_grid", *spec.g2_grid);
  } else {
    kv.emplace_back("g", join(spec.couplings));
  }
  if (spec.command == Command::prob) {
    kv.emplace_back("i", spec.initial);
    kv.emplace_back("f", spec.final_state);
  }
  if (spec.command == Command::oracle) {
    kv.emplace_back("i", spec.initial.empty() ? SpinConfig::all_up(spec.spin_counts.at(0)).to_string() : spec.initial);
    kv.emplace_back("eps", spec.splittings.empty() ? "default" : join(spec.splittings));
    kv.emplace_back("T_schedule", spec.windows.empty() ? "default" : join(spec.windows));
  }
  if (spec.command != Command::prob) kv.emplace_back("tol", format_number(spec.tol));
  kv.emplace_back("format", to_string(spec.format));
  return kv;
}

Report execute(const RunSpec& spec) {
  validate(spec);
  Report r;
  switch (spec.command) {
    case Command::prob: r = prob_report(spec); break;
    case Command::dist: r = dist_report(spec); break;
    case Command::mean: r = mean_report(spec); break;
    case Command::sweep: r = sweep_report(spec); break;
    case Command::oracle:
      try {
        r = oracle_report(spec);
      } catch (ToleranceFailure& f) {
        f.report.meta = describe(spec);
        throw;
      }
      break;
  }
  r.meta = describe(spec);
  return r;
}

void write_report(std::ostream& out, const Report& report, Format format) {
  switch (format) {
    case Format::text: {
      // prob only: "<monomial> = <value>" per coupling
      const auto& cols = report.table.columns;
      const auto mono = std::find(cols.begin(), cols.end(), "monomial") - cols.begin();
      const auto value = std::find(cols.begin(), cols.end(), "probability") - cols.begin();
      for (const auto& row : report.table.rows)
        out << format_cell(row[static_cast<std::size_t>(mono)]) << " = " << format_cell(row[static_cast<std::size_t>(value)]) << '\n';
      break;
    }
    case Format::csv: write_csv(out, report); break;
    case Format::json: write_json(out, report); break;
  }
}

namespace {

struct CommonFlags {
  std::vector<int> ns;
  std::vector<std::string> s;
  int nb = 0;
  std::vector<double> g;
  std::string g2_grid;
  std::string process = "forward";
  std::string format;
  std::string out;
  double tol = 0.0;
  int threads = 0;
  std::string initial, final_state;
  std::vector<double> windows, eps;
  std::string preset;
};

void add_output_flags(CLI::App* sub, CommonFlags& f, bool allow_text) {
  std::vector<std::string> formats{"csv", "json"};
  if (allow_text) formats.insert(formats.begin(), "text");
  sub->add_option("--format", f.format, "Output format")->check(CLI::IsMember(formats));
  sub->add_option("--out", f.out, "Write to this file instead of stdout");
  sub->add_option("--threads", f.threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
}

void add_model_flags(CLI::App* sub, CommonFlags& f, bool many_spins) {
  auto* ns = sub->add_option("--ns", f.ns, "Number of spins N_s = 2S");
  auto* s = sub->add_option("--s", f.s, "Spin S, e.g. 15/2");
  if (many_spins) {
    ns->delimiter(',');
    s->delimiter(',');
  } else {
    ns->expected(1);
    s->expected(1);
  }
  ns->excludes(s);
  sub->add_option("--nb", f.nb, "Bosons in the all-up state");
}

void add_coupling_flags(CLI::App* sub, CommonFlags& f, bool allow_grid) {
  auto* g = sub->add_option("--g", f.g, "Coupling(s), comma separated")->delimiter(',');
  if (allow_grid) {
    auto* grid = sub->add_option("--g2-grid", f.g2_grid, "Grid of g^2 values a:b:step");
    g->excludes(grid);
  }
}

Process parse_process(const std::string& s) { return s == "inverse" ? Process::inverse : Process::forward; }

Format parse_format(const std::string& s, Format fallback) {
  if (s == "text") return Format::text;
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  return fallback;
}

RunSpec resolve(Command command, const CommonFlags& f) {
  RunSpec spec;
  spec.command = command;
  spec.process = parse_process(f.process);
  spec.n_bosons = f.nb;
  spec.threads = f.threads;
  spec.out = f.out;
  spec.format = parse_format(f.format, command == Command::prob ? Format::text : Format::csv);
  spec.initial = f.initial;
  spec.final_state = f.final_state;
  spec.windows = f.windows;
  spec.splittings = f.eps;
  spec.tol = f.tol > 0.0 ? f.tol : (command == Command::oracle ? 2e-2 : kDefaultTol);
  if (f.tol < 0.0) spec.tol = f.tol;  // rejected by validate
  spec.spin_counts = f.ns;
  for (const auto& s : f.s) spec.spin_counts.push_back(parse_spin(s));
  if (spec.spin_counts.empty() && command == Command::prob && !f.initial.empty())
    spec.spin_counts = {static_cast<int>(f.initial.size())};
  if (!f.g2_grid.empty()) {
    spec.g2_grid = normalise_grid(f.g2_grid);
    spec.couplings = couplings_from_grid(*spec.g2_grid);
  } else {
    spec.couplings = f.g;
  }
  return spec;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and approximate scattering probabilities of the driven Tavis-Cummings model", "dtcm"};
  app.set_version_flag("--version", DTCM_VERSION);
  app.require_subcommand(1);

  CommonFlags f;
  Command command = Command::dist;
  bool figure = false;

  auto* prob = app.add_subcommand("prob", "State-to-state probability: symbolic monomial and value");
  add_model_flags(prob, f, false);
  add_coupling_flags(prob, f, false);
  prob->add_option("--i", f.initial, "Initial spins, spin 1 leftmost, 1 = up")->required();
  prob->add_option("--f", f.final_state, "Final spins")->required();
  add_output_flags(prob, f, true);
  prob->callback([&] { command = Command::prob; });

  auto* dist = app.add_subcommand("dist", "Distribution of nu with approximation columns");
  add_model_flags(dist, f, false);
  add_coupling_flags(dist, f, true);
  dist->add_option("--process", f.process)->check(CLI::IsMember({"forward", "inverse"}));
  dist->add_option("--tol", f.tol, "Truncation tolerance for infinite products and series");
  add_output_flags(dist, f, false);
  dist->callback([&] { command = Command::dist; });

  auto* mean = app.add_subcommand("mean", "Mean boson number against g^2, exact and approximate");
  add_model_flags(mean, f, false);
  add_coupling_flags(mean, f, true);
  mean->add_option("--process", f.process)->check(CLI::IsMember({"forward", "inverse"}));
  mean->add_option("--tol", f.tol, "Truncation tolerance for infinite products and series");
  add_output_flags(mean, f, false);
  mean->callback([&] { command = Command::mean; });

  auto* sweep = app.add_subcommand("sweep", "Moments of the exact distribution over spin and coupling grids");
  add_model_flags(sweep, f, true);
  add_coupling_flags(sweep, f, true);
  sweep->add_option("--process", f.process)->check(CLI::IsMember({"forward", "inverse"}));
  sweep->add_option("--tol", f.tol, "Unused by the exact sums; recorded for completeness");
  add_output_flags(sweep, f, false);
  sweep->callback([&] { command = Command::sweep; });

  auto* oracle = app.add_subcommand("oracle", "Integrate the Schroedinger equation and compare with the exact result");
  add_model_flags(oracle, f, false);
  add_coupling_flags(oracle, f, false);
  oracle->add_option("--i", f.initial, "Initial spins (default all up)");
  oracle->add_option("--T-schedule", f.windows, "Half-widths of the time window, increasing")->delimiter(',');
  oracle->add_option("--eps", f.eps, "Splittings e_1 > e_2 > ... (default spacing 2)")->delimiter(',');
  oracle->add_option("--tol", f.tol, "Allowed |extrapolated - exact| (default 0.02)");
  add_output_flags(oracle, f, false);
  oracle->callback([&] { command = Command::oracle; });

  auto* fig = app.add_subcommand("figure", "Named parameter sets for the dist and mean tables");
  fig->add_option("--preset", f.preset, "Preset name")->required()->check(CLI::IsMember(preset_names()));
  add_output_flags(fig, f, false);
  fig->callback([&] { figure = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  RunSpec spec;
  Report report;
  try {
    if (figure) {
      spec = preset(f.preset);
      spec.format = parse_format(f.format, Format::csv);
      spec.out = f.out;
      spec.threads = f.threads;
    } else {
      spec = resolve(command, f);
    }
    report = execute(spec);
  } catch (const ToleranceFailure& failure) {
    // the comparison table is still written so the mismatch can be inspected
    if (spec.out.empty()) {
      write_report(out, failure.report, spec.format);
    } else {
      std::ofstream file(spec.out);
      write_report(file, failure.report, spec.format);
    }
    err << "dtcm: " << failure.message << '\n';
    return 3;
  } catch (const NumericalError& e) {
    err << "dtcm: numerical failure at t = " << format_number(e.time()) << ": " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "dtcm: " << e.what() << '\n';
    return 2;
  }

  if (spec.out.empty()) {
    write_report(out, report, spec.format);
  } else {
    std::ofstream file(spec.out);
    if (!file) {
      err << "dtcm: cannot open " << spec.out << '\n';
      return 2;
    }
    write_report(file, report, spec.format);
  }
  return 0;
}

}  // namespace dtcm::app
