#pragma once

// Multi-phase moment relaxation of the weak Fokker-Planck control problem.
//
// Phase k (k = 1..K) owns an occupation measure mu_k on (t, x, u) over
// [t_{k-1}, t_k]; interface measures nu_k on x sit at the breakpoints, with
// nu_0 the initial law and nu_K the terminal law (fixed or free). For every
// test monomial v(t, x) of degree <= d_test the assembled rows read
//
//   <v(t_k,.), nu_k> - <v(t_{k-1},.), nu_{k-1}> - <Lv, mu_k> = 0,
//
// and the objective is sum_k <c, mu_k> (+ <terminal_cost, nu_K>).

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "momentfp/conic.hpp"
#include "momentfp/generator.hpp"
#include "momentfp/moments.hpp"
#include "momentfp/polycore.hpp"

namespace mfp {

/// Declared bounding box used to rescale states and controls to [-1, 1].
struct ScalingBox {
  Eigen::VectorXd state_lower, state_upper;
  Eigen::VectorXd control_lower, control_upper;
};

struct ScenarioSpec {
  DynamicsSpec dynamics;
  MeasureSpec initial;
  MeasureSpec terminal;
  SupportSet state_support;
  SupportSet control_support;
  SupportSet terminal_support;
  Polynomial cost;
  std::optional<Polynomial> terminal_cost;
  int degree = 4;
  int phases = 1;
  std::optional<ScalingBox> box;

  const VariableSpace& space() const { return dynamics.space; }
  void validate() const;
};

/// physical = offset + scale * scaled, per coordinate; time = horizon * t'.
struct AffineTransform {
  double horizon = 1.0;
  Eigen::VectorXd state_offset, state_scale;
  Eigen::VectorXd control_offset, control_scale;

  static AffineTransform identity(const DynamicsSpec& dyn);

  Eigen::VectorXd state_to_physical(const Eigen::VectorXd& x) const;
  Eigen::VectorXd state_to_scaled(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd covariance_to_physical(const Eigen::MatrixXd& c) const;
  double time_to_physical(double t) const { return horizon * t; }

  /// p(physical) -> p'(scaled) with p'(z') = p(z(z')).
  Polynomial to_scaled(const Polynomial& p) const;
  /// Inverse of to_scaled.
  Polynomial to_physical(const Polynomial& p) const;

 private:
  void offsets_and_scales(const VariableSpace& space, bool inverse, std::vector<double>& off,
                          std::vector<double>& sc) const;
};

/// Affine change of variables to unit horizon and [-1, 1] boxes. Without a
/// declared box only time is rescaled.
std::pair<ScenarioSpec, AffineTransform> scale_scenario(const ScenarioSpec& scn);

struct MeasureRef {
  enum class Role { occupation, interface };
  Role role;
  int index;  // phase (1..K) for occupation, breakpoint (0..K) for interface

  std::string label() const;
};

struct MeasureLayout {
  MeasureRef ref;
  std::vector<BlockKind> blocks;
  std::vector<ExponentVector> basis;
  int first_var = -1;                // -1 when the moments are fixed data
  std::optional<MomentVector> fixed;
};

struct AssembledProgram {
  ConicProgram conic;
  ScenarioSpec scenario;  // the scenario actually assembled (already scaled)
  std::vector<double> breakpoints;
  int test_degree = 0;
  std::vector<MeasureLayout> measures;  // nu_0, mu_1, nu_1, ..., mu_K, nu_K
  std::map<std::pair<int, ExponentVector>, int> index_map;  // (measure slot, exponent) -> variable
  std::vector<std::pair<int, ExponentVector>> variable_owner;  // moment variable -> (slot, exponent)
  std::map<std::pair<int, ExponentVector>, int> constraint_map;  // (phase, test monomial) -> row
  std::vector<int> mass_rows;
  std::vector<std::string> psd_labels;

  int phases() const { return static_cast<int>(breakpoints.size()) - 1; }
  int occupation_slot(int phase) const { return 2 * phase - 1; }
  int interface_slot(int breakpoint) const { return 2 * breakpoint; }

  /// Moments of the measure in `slot`, read from a primal vector or fixed data.
  MomentVector moments(const Eigen::VectorXd& primal, int slot) const;
};

/// Builds the conic program. Throws std::invalid_argument when the cost
/// exceeds the relaxation degree or the test degree would drop below 1.
AssembledProgram assemble_primal(const ScenarioSpec& scn);

}  // namespace mfp
