#pragma once

// JSON scenario configuration with a strict schema. Every error names the
// offending key as a dotted path, e.g. `measures.terminal.point`.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "momentfp/christoffel.hpp"
#include "momentfp/conic.hpp"
#include "momentfp/relaxation.hpp"

namespace mfp {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& msg)
      : std::runtime_error(key.empty() ? msg : key + ": " + msg), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct ChristoffelCostSpec {
  std::string csv;                     // resolved path
  std::vector<std::string> columns;
  std::vector<std::string> variables;  // scenario variables the columns map to
  int degree = 4;
  std::optional<double> epsilon;       // default: 1e-8 trace(M) / side
  double lambda_control = 0.0;
  std::optional<NormalizationBox> box;
};

struct RunConfig {
  std::string name;
  ScenarioSpec scenario;
  SolverSettings solver;
  std::string output_prefix;
  std::optional<ChristoffelCostSpec> christoffel;
  std::vector<std::string> warnings;
};

/// Relative CSV paths resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

}  // namespace mfp
