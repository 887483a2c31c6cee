#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace backflow::cli {

struct CheckResult {
  std::string name;
  bool passed;
  double measured;  ///< worst deviation observed
  double bound;
};

/// Cross-checks of the analytic results against the numerical oracles.
std::vector<CheckResult> run_validation_suite(unsigned threads);

void print_validation_table(const std::vector<CheckResult>& results, std::ostream& os);

}  // namespace backflow::cli
