#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spinfront/analysis.hpp"
#include "spinfront/chain_model.hpp"
#include "spinfront/correlations.hpp"

namespace spinfront {

inline constexpr std::string_view kToolName = "spinfront";
inline constexpr std::string_view kToolVersion = SPINFRONT_VERSION;

enum class Command { Evolve, Scan, Peaks, ValidateRwa, Heisenberg };
enum class OutputFormat { Csv, Json };

std::string_view to_string(Command command);
Command parse_command(std::string_view name);
std::string_view to_string(OutputFormat format);
OutputFormat parse_format(std::string_view name);

// "a" or "a:b" or "a:b:step", inclusive.
struct ChainLengths {
  int first = 2;
  int last = 2;
  int step = 1;

  std::vector<int> values() const;
  std::string to_string() const;
};
ChainLengths parse_chain_lengths(std::string_view text);

// "lo:hi:count" -> count evenly spaced values including both ends, or a
// single value.
std::vector<double> parse_ratio_range(std::string_view text);

// Comma separated reals, e.g. "1e-4,1e-5".
std::vector<double> parse_real_list(std::string_view text);

struct RunConfig {
  Command command = Command::Evolve;
  ChainSpec chain{Model::IsingRWA, 20, 1.0, 10.0};  // n_sites is taken from lengths
  ChainLengths lengths{20, 20, 1};
  MeasureSet measures = MeasureSet::all();
  std::vector<double> criteria{1e-6};
  double dt = 0.02;
  std::optional<double> t_max;  // default: 2.5 N / J
  int peaks = 2;
  std::vector<double> ratios;
  // evolve, validate-rwa: file path ("-" = stdout). scan, heisenberg, peaks:
  // prefix for <prefix>.<measure>.delta-<d>.csv / <prefix>.peaks.csv and
  // <prefix>.summary.json.
  std::string output = "-";
  OutputFormat format = OutputFormat::Csv;
  int workers = 1;
  std::string from_summary;  // refit a saved summary instead of computing
};

// Throws std::invalid_argument describing the first offending field.
void validate(const RunConfig& config);

// Effective configuration as a single-line JSON object (keys sorted).
std::string config_echo(const RunConfig& config);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;
inline constexpr int kExitPartial = 4;

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::string> files;     // written, in order
  std::vector<std::string> warnings;  // reasons for a partial result
};

// Executes one command. Errors are reported on `log` and mapped to exit codes;
// nothing is thrown.
RunResult run(const RunConfig& config, std::ostream& stdout_sink, std::ostream& log);

// Plain table with a fixed column order.
using Cell = std::variant<double, long long, std::string>;
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// "%.17g"; nan, inf and -inf spelled as such.
std::string format_real(double value);

// CSV: '#' header lines (tool version, config echo, schema), then the column
// row and one line per row, LF endings. JSON: {"tool", "version", "config",
// "columns", "rows"}.
void write_table(std::ostream& out, const Table& table, const RunConfig& config,
                 OutputFormat format);

}  // namespace spinfront
