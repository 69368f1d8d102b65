#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "momentfp/generator.hpp"
#include "momentfp/postprocess.hpp"
#include "momentfp/scenarios.hpp"

using namespace mfp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

RunSummary summarize(const PipelineRun& run, const std::string& name) {
  RunSummary s;
  s.scenario = name;
  s.status = status_name(run.solution.status);
  s.primal_objective = run.solution.primal_objective;
  s.dual_objective = run.solution.dual_objective;
  s.residuals = run.solution.residuals;
  s.iterations = run.solution.iterations;
  s.variables = run.program.conic.num_vars;
  s.rows = run.program.conic.num_rows();
  return s;
}

}  // namespace

TEST_CASE("scalar transfer: dirac statistics and dual recovery") {
  const auto run = run_pipeline(scalar_transfer_scenario(4, 4));
  REQUIRE(run.optimal());
  const auto tr = interface_statistics(run.solution, run.program, run.transform);
  REQUIRE(tr.breakpoints.size() == 5);
  CHECK(std::abs(tr.breakpoints.front().covariance(0, 0)) < 1e-6);
  CHECK(std::abs(tr.breakpoints.back().covariance(0, 0)) < 1e-6);
  CHECK(tr.breakpoints.front().mean(0) == 0.0);
  CHECK(tr.breakpoints.back().mean(0) == 1.0);
  for (const auto& b : tr.breakpoints) CHECK(std::abs(b.mass - 1.0) < 1e-6);
  double occ = 0.0, cost = 0.0;
  for (const auto& p : tr.phases) {
    occ += p.occupation_mass;
    cost += p.expected_cost;
    CHECK(std::abs(p.occupation_mass - 0.25) < 1e-6);
  }
  CHECK(std::abs(occ - 1.0) < 1e-6);
  CHECK(std::abs(cost - run.solution.primal_objective) < 1e-6);

  const auto vf = recover_value_function(run.solution, run.program, run.transform);
  CHECK(std::abs(vf.dual_objective - 1.0) < 1e-3);
  CHECK(std::abs(vf.dual_objective - run.solution.dual_objective) < 1e-9);
  CHECK(vf.dual_objective <= run.solution.primal_objective + 10 * 1e-8);
  REQUIRE(vf.min_dual_slack.size() == 4);
  for (size_t k = 0; k < 4; ++k) {
    CHECK(vf.min_dual_slack[k] >= -1e-4);
    CHECK(vf.grid_points_used[k] == 10000);
    CHECK(vf.phases[k].degree() <= run.program.test_degree);
  }
}

TEST_CASE("value function in physical units matches the scaled one") {
  auto s = scalar_transfer_scenario(4, 1);
  s.dynamics.horizon = 2.0;
  s.box = ScalingBox{-Eigen::VectorXd::Ones(1), 2.0 * Eigen::VectorXd::Ones(1), -2.0 * Eigen::VectorXd::Ones(1),
                     2.0 * Eigen::VectorXd::Ones(1)};
  const auto run = run_pipeline(s);
  REQUIRE(run.optimal());
  // T = 2 needs u = 1/2: cost 2 * 1/4.
  CHECK(std::abs(run.solution.primal_objective - 0.5) < 1e-4);
  const auto vf = recover_value_function(run.solution, run.program, run.transform);
  const double z[3] = {0.7, 0.4, 0.0};
  const double zs[3] = {0.35, (0.4 - 0.5) / 1.5, 0.0};
  CHECK(vf.phases[0].evaluate(z) == doctest::Approx(vf.scaled_phases[0].evaluate(zs)).epsilon(1e-9));
  // physical dual slack L V + c >= 0 on a point inside the supports
  const auto slack = apply_generator(vf.phases[0], s.dynamics) + s.cost;
  CHECK(slack.evaluate(z) >= -1e-4);
  CHECK(vf.min_dual_slack[0] >= -1e-4);
}

TEST_CASE("OU breakpoint statistics follow the analytic curves") {
  const double sigma2 = 0.5, x0 = 1.0;
  const auto run = run_pipeline(ou_scenario(sigma2, x0, 2.0, 6, 8));
  REQUIRE(run.optimal());
  const auto tr = interface_statistics(run.solution, run.program, run.transform);
  REQUIRE(tr.breakpoints.size() == 9);
  for (const auto& b : tr.breakpoints) {
    const double m = ou_mean(b.t, sigma2, x0);
    const double v = ou_second_moment(b.t, sigma2, x0) - m * m;
    CHECK(std::abs(b.mass - 1.0) < 1e-6);
    CHECK(std::abs(b.mean(0) - m) <= 0.02 * std::abs(m));
    if (b.t > 0) CHECK(std::abs(b.covariance(0, 0) - v) <= 0.02 * v);
    CHECK(b.covariance(0, 0) >= -1e-7);
  }
  CHECK(tr.breakpoints.back().t == doctest::Approx(2.0));
}

TEST_CASE("zero cost gives a zero dual objective") {
  ScenarioSpec s;
  const auto sp = VariableSpace::make(1, 1);
  s.dynamics.space = sp;
  s.dynamics.drift = {Polynomial::parse("u1", sp)};
  s.dynamics.diffusion = Eigen::MatrixXd::Constant(1, 1, 0.1);
  s.initial = MeasureSpec::make_dirac(Eigen::VectorXd::Zero(1));
  s.terminal = MeasureSpec::make_free(1);
  s.state_support.inequalities = {Polynomial::parse("4 + -1 * x1^2", sp)};
  s.control_support.inequalities = {Polynomial::parse("1 + -1 * u1^2", sp)};
  s.terminal_support = s.state_support;
  s.cost = Polynomial(sp);
  s.degree = 4;
  s.phases = 2;
  const auto run = run_pipeline(s);
  REQUIRE(run.optimal());
  const auto vf = recover_value_function(run.solution, run.program, run.transform);
  CHECK(std::abs(vf.dual_objective) < 1e-6);
  CHECK(std::abs(run.solution.primal_objective) < 1e-6);
}

TEST_CASE("non-optimal solutions are rejected") {
  const auto run = run_pipeline(scalar_transfer_scenario(4, 1));
  auto bad = run.solution;
  bad.status = SolveStatus::primal_infeasible;
  CHECK_THROWS_AS(interface_statistics(bad, run.program, run.transform), std::invalid_argument);
  CHECK_THROWS_AS(recover_value_function(bad, run.program, run.transform), std::invalid_argument);
}

TEST_CASE("exports: layout and byte-identical reruns") {
  const auto dir = fs::temp_directory_path() / "momentfp_export";
  fs::remove_all(dir);
  std::vector<std::string> contents[2];
  for (int rep = 0; rep < 2; ++rep) {
    const auto run = run_pipeline(ou_scenario(0.5, 1.0, 2.0, 4, 4));
    REQUIRE(run.optimal());
    const auto tr = interface_statistics(run.solution, run.program, run.transform);
    const auto vf = recover_value_function(run.solution, run.program, run.transform);
    auto sum = summarize(run, "ou");
    sum.dual_objective = vf.dual_objective;
    const auto out = dir / std::to_string(rep);
    export_trace(tr, vf, sum, out.string());
    for (const char* f : {"stats.csv", "phases.csv", "value_fn.txt", "summary.json"}) {
      REQUIRE(fs::exists(out / f));
      contents[rep].push_back(slurp(out / f));
    }
    if (rep == 0) {
      const auto stats = contents[0][0];
      CHECK(stats.rfind("t,mass,mean_x1,cov_x1_x1\n", 0) == 0);
      CHECK(count_lines(stats) == 1 + 5);
      CHECK(count_lines(contents[0][1]) == 1 + 4);
      CHECK(count_lines(contents[0][2]) == 4);
      const auto js = contents[0][3];
      const std::string key = "\"dual_objective\": ";
      REQUIRE(js.find(key) != std::string::npos);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.12g", vf.dual_objective);
      CHECK(std::stod(js.substr(js.find(key) + key.size())) == std::stod(buf));
    }
  }
  CHECK(contents[0] == contents[1]);
  CHECK_THROWS(export_trace({}, {}, {}, "/proc/momentfp_cannot_write"));
  fs::remove_all(dir);
}

TEST_CASE("halton points") {
  const auto h1 = halton(1, 2), h2 = halton(2, 2), h3 = halton(3, 2);
  CHECK(h1 == std::vector<double>{0.5, 1.0 / 3.0});
  CHECK(h2[0] == 0.25);
  CHECK(h3[1] == doctest::Approx(1.0 / 9.0));
  CHECK_THROWS(halton(1, 40));
}
