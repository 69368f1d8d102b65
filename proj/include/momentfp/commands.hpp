#pragma once

// The three CLI commands as library calls. Each returns the process exit code:
// 0 success, 1 config/input error, 2 infeasible or unbounded, 3 numerical
// trouble (solve) or failed checks (check).

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mfp {

struct SolveOptions {
  std::optional<std::string> output_prefix;  // overrides output.prefix
  bool quiet = false;
};

int cmd_solve(const std::string& config_path, const SolveOptions& opts, std::ostream& out, std::ostream& err);

struct FitOptions {
  std::string csv;
  std::vector<std::string> columns;
  int degree = 4;
  std::optional<double> epsilon;
  std::string out_dir;
  int grid = 101;  // points per axis for 1-D and 2-D grid dumps
};

int cmd_fit_christoffel(const FitOptions& opts, std::ostream& out, std::ostream& err);

struct CheckCommandOptions {
  std::string filter;
  std::optional<double> tol;
};

int cmd_check(const CheckCommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace mfp
