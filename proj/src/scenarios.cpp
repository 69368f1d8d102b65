#include "momentfp/scenarios.hpp"

#include <chrono>
#include <cmath>

namespace mfp {

PipelineRun run_pipeline(const ScenarioSpec& scn, const SolverSettings& settings, const ConicBackend* backend) {
  const auto t0 = std::chrono::steady_clock::now();
  PipelineRun run;
  auto [scaled, tr] = scale_scenario(scn);
  run.scaled = std::move(scaled);
  run.transform = std::move(tr);
  run.program = assemble_primal(run.scaled);
  run.solution = backend ? backend->solve(run.program.conic, settings) : solve(run.program.conic, settings);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

namespace {

ScalingBox make_box(std::initializer_list<double> xlo, std::initializer_list<double> xhi,
                    std::initializer_list<double> ulo, std::initializer_list<double> uhi) {
  auto vec = [](std::initializer_list<double> l) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(l.size()));
    Eigen::Index i = 0;
    for (double x : l) v(i++) = x;
    return v;
  };
  return {vec(xlo), vec(xhi), vec(ulo), vec(uhi)};
}

}  // namespace

ScenarioSpec scalar_transfer_scenario(int degree, int phases) {
  ScenarioSpec s;
  const auto sp = VariableSpace::make(1, 1);
  s.dynamics.space = sp;
  s.dynamics.drift = {Polynomial::parse("u1", sp)};
  s.dynamics.diffusion = Eigen::MatrixXd::Zero(1, 1);
  s.dynamics.horizon = 1.0;
  s.initial = MeasureSpec::make_dirac(Eigen::VectorXd::Zero(1));
  s.terminal = MeasureSpec::make_dirac(Eigen::VectorXd::Ones(1));
  s.cost = Polynomial::parse("u1^2", sp);
  s.degree = degree;
  s.phases = phases;
  return s;
}

ScenarioSpec double_integrator_scenario(int degree, int phases) {
  ScenarioSpec s;
  const auto sp = VariableSpace::make(2, 1);
  s.dynamics.space = sp;
  s.dynamics.drift = {Polynomial::parse("x2", sp), Polynomial::parse("u1", sp)};
  s.dynamics.diffusion = Eigen::MatrixXd::Zero(2, 2);
  s.dynamics.horizon = 1.0;
  s.initial = MeasureSpec::make_dirac(Eigen::VectorXd::Zero(2));
  Eigen::VectorXd target(2);
  target << 1.0, 0.0;
  s.terminal = MeasureSpec::make_dirac(target);
  s.cost = Polynomial::parse("u1^2", sp);
  s.degree = degree;
  s.phases = phases;
  s.box = make_box({-1.0, -1.0}, {2.0, 2.0}, {-8.0}, {8.0});
  return s;
}

ScenarioSpec ou_scenario(double sigma2, double x0, double horizon, int degree, int phases) {
  ScenarioSpec s;
  const auto sp = VariableSpace::make(1, 0);
  s.dynamics.space = sp;
  s.dynamics.drift = {Polynomial::parse("-1 * x1", sp)};
  s.dynamics.diffusion = Eigen::MatrixXd::Constant(1, 1, 0.5 * sigma2);
  s.dynamics.horizon = horizon;
  s.initial = MeasureSpec::make_dirac(Eigen::VectorXd::Constant(1, x0));
  s.terminal = MeasureSpec::make_free(1);
  // Generous ball; the Gaussian tails beyond it are invisible at these degrees.
  const double r = std::abs(x0) + 4.0;
  s.terminal_support.inequalities = {Polynomial::constant(sp, r * r) - Polynomial::parse("x1^2", sp)};
  s.cost = Polynomial(sp);
  s.degree = degree;
  s.phases = phases;
  return s;
}

double ou_mean(double t, double /*sigma2*/, double x0) { return x0 * std::exp(-t); }

double ou_second_moment(double t, double sigma2, double x0) {
  return x0 * x0 * std::exp(-2.0 * t) + 0.5 * sigma2 * (1.0 - std::exp(-2.0 * t));
}

}  // namespace mfp
