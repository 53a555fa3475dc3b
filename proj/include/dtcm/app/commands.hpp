#pragma once

// Subcommands of the dtcm tool. Every subcommand resolves its flags into a
// RunSpec and a single execute() path turns that into a Report, so a preset
// and the equivalent explicit invocation print identical bytes.

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dtcm/app/csv.hpp"
#include "dtcm/distribution.hpp"
#include "dtcm/qspecial.hpp"

namespace dtcm::app {

enum class Command { prob, dist, mean, sweep, oracle };
enum class Format { text, csv, json };

const char* to_string(Command c);
const char* to_string(Format f);

struct RunSpec {
  Command command = Command::dist;
  Process process = Process::forward;
  std::vector<int> spin_counts;  // one entry except for sweep
  int n_bosons = 0;
  std::vector<double> couplings;  // g values, strictly increasing
  std::optional<std::string> g2_grid;  // normalised "a:b:step" when the grid came from one
  std::string initial;      // prob, oracle
  std::string final_state;  // prob
  std::vector<double> windows;     // oracle half-widths; empty means the default schedule
  std::vector<double> splittings;  // oracle; empty means equally spaced by 2
  double tol = kDefaultTol;
  Format format = Format::csv;
  // Neither of these reaches the output.
  std::string out;
  int threads = 0;  // 0: hardware concurrency
};

/// Parses "a:b:step" into the g^2 values a, a+step, ..., up to b.
/// Throws std::invalid_argument on malformed or non-increasing grids.
std::vector<double> parse_g2_grid(std::string_view text);

/// Parses a spin value such as "15/2", "7.5" or "3" and returns 2S.
int parse_spin(std::string_view text);

/// Named parameter sets for the figure subcommand.
std::vector<std::string> preset_names();
RunSpec preset(std::string_view name);

/// Resolved flags as they appear in the metadata line.
KeyValues describe(const RunSpec& spec);

/// Thrown when an oracle comparison misses its tolerance; carries the report.
struct ToleranceFailure {
  Report report;
  std::string message;
};

/// Runs a resolved spec. Errors: std::invalid_argument / std::domain_error /
/// std::length_error for bad input, dtcm::NumericalError from the integrator,
/// ToleranceFailure from the oracle comparison.
Report execute(const RunSpec& spec);

void write_report(std::ostream& out, const Report& report, Format format);

/// Full command line entry point. Exit codes: 0 success, 2 flag or domain
/// error, 3 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dtcm::app
