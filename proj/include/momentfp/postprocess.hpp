#pragma once

// Reading results back out of a solved relaxation: breakpoint statistics from
// the interface measures, value functions from the equality multipliers, and
// file export.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "momentfp/conic.hpp"
#include "momentfp/relaxation.hpp"

namespace mfp {

struct BreakpointStats {
  double t = 0.0;
  double mass = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd second_moment;  // E[x x']
};

struct PhaseStats {
  double t_start = 0.0, t_end = 0.0;
  double occupation_mass = 0.0;  // equals the phase length at a feasible point
  double expected_cost = 0.0;
};

/// All quantities in physical units.
struct StatisticsTrace {
  std::vector<BreakpointStats> breakpoints;
  std::vector<PhaseStats> phases;
};

StatisticsTrace interface_statistics(const ConicSolution& sol, const AssembledProgram& prog,
                                     const AffineTransform& transform);

struct ValueFunctionEstimate {
  std::vector<Polynomial> phases;         // V_k in physical coordinates
  std::vector<Polynomial> scaled_phases;  // V_k as assembled
  double dual_objective = 0.0;
  std::vector<double> min_dual_slack;     // min of LV_k + c over the grid, per phase
  std::vector<int> grid_points_used;      // grid points inside the supports, per phase
};

/// V_k = sum_v lambda_(k,v) v. The dual check samples `grid_points` Halton
/// points per phase in the scaling box (or [-1,1] without one), keeping those
/// inside the state and control supports.
ValueFunctionEstimate recover_value_function(const ConicSolution& sol, const AssembledProgram& prog,
                                             const AffineTransform& transform, int grid_points = 10000);

struct RunSummary {
  std::string scenario;
  std::string status;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  Residuals residuals;
  int iterations = 0;
  int variables = 0;
  int rows = 0;
  int psd_blocks = 0;
};

/// Writes stats.csv, phases.csv, value_fn.txt and summary.json into the
/// directory `prefix` (created if missing). Numbers use 12 significant digits.
void export_trace(const StatisticsTrace& trace, const ValueFunctionEstimate& vf, const RunSummary& summary,
                  const std::string& prefix);

/// Halton point `index` (>= 1) in [0,1]^dim.
std::vector<double> halton(long index, int dim);

}  // namespace mfp
