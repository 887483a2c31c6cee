#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace backflow::cli {

/// Formats a double with 17 significant digits.
std::string format_number(double v);

/// Streams rows as CSV (header first) or NDJSON (one object per row).
class TableWriter {
 public:
  TableWriter(std::ostream& os, Format format, std::vector<std::string> columns);
  void row(const std::vector<double>& values);

 private:
  std::ostream& os_;
  Format format_;
  std::vector<std::string> columns_;
};

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> outputs;  ///< files written, excluding the manifest
};

/// Executes a validated config. Data goes to config.out (or `fallback` when
/// empty); with `validate` the oracle suite runs afterwards and its table is
/// printed to `log`.
RunResult run(const RunConfig& config, unsigned threads, bool validate, std::ostream& fallback,
              std::ostream& log);

/// Column layout per scenario, for --help.
std::string column_help();

}  // namespace backflow::cli
