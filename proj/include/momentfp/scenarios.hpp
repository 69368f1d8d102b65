#pragma once

// Reference scenarios with known answers, and the scale -> assemble -> solve
// pipeline shared by the CLI, the check suite and the tests.

#include "momentfp/conic.hpp"
#include "momentfp/relaxation.hpp"

namespace mfp {

struct PipelineRun {
  ScenarioSpec scaled;
  AffineTransform transform;
  AssembledProgram program;
  ConicSolution solution;
  double seconds = 0.0;  // scale + assemble + solve

  bool optimal() const { return solution.status == SolveStatus::optimal; }
};

PipelineRun run_pipeline(const ScenarioSpec& scn, const SolverSettings& settings = {},
                         const ConicBackend* backend = nullptr);

/// f = u, D = 0, c = u^2, delta_0 -> delta_1, T = 1. Optimal value 1.
ScenarioSpec scalar_transfer_scenario(int degree = 4, int phases = 1);

/// f = (x2, u), D = 0, c = u^2, delta(0,0) -> delta(1,0), T = 1. Optimal value
/// 12 (u = 6 - 12t) once d >= 6.
ScenarioSpec double_integrator_scenario(int degree = 6, int phases = 1);

/// f = -x, D = sigma2 / 2, no control, c = 0, delta(x0) -> free.
ScenarioSpec ou_scenario(double sigma2 = 0.5, double x0 = 1.0, double horizon = 2.0, int degree = 6,
                         int phases = 8);

/// Analytic OU moments: E[x] and E[x^2] at time t.
double ou_mean(double t, double sigma2, double x0);
double ou_second_moment(double t, double sigma2, double x0);

}  // namespace mfp
