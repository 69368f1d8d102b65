#pragma once

// Built-in oracle suite behind `momentfp check`.

#include <string>
#include <vector>

#include "momentfp/conic.hpp"

namespace mfp {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct CheckOptions {
  /// Comma-separated names or name prefixes; empty runs everything.
  std::string filter;
  SolverSettings solver;
};

std::vector<std::string> check_names();

/// Throws std::invalid_argument when the filter matches no check.
std::vector<CheckResult> run_checks(const CheckOptions& opts);

}  // namespace mfp
