// Acceptance suite: one PASS/FAIL line per criterion, exit 0 iff all pass.
// Usage: acceptance [config_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "momentfp/christoffel.hpp"
#include "momentfp/commands.hpp"
#include "momentfp/config.hpp"
#include "momentfp/postprocess.hpp"
#include "momentfp/scenarios.hpp"
#include "oracles.hpp"

using namespace mfp;
namespace fs = std::filesystem;

namespace {

std::string config_dir = MOMENTFP_CONFIG_DIR;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string f(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

struct SuiteRun {
  std::string label;
  RunConfig cfg;
  PipelineRun run;
};

// Every solve in the suite, for the weak-duality sweep.
std::vector<SuiteRun> all_runs;

const PipelineRun& solve_config(const std::string& name, const std::function<void(RunConfig&)>& tweak = {},
                                const std::string& label = "") {
  RunConfig cfg = load_config((fs::path(config_dir) / (name + ".json")).string());
  if (tweak) tweak(cfg);
  all_runs.push_back({label.empty() ? name : label, cfg, run_pipeline(cfg.scenario, cfg.solver)});
  return all_runs.back().run;
}

double rel_gap(const ConicSolution& s) {
  return std::abs(s.primal_objective - s.dual_objective) / std::max(1.0, std::abs(s.primal_objective));
}

Verdict not_optimal(const PipelineRun& r) { return {false, std::string("status ") + status_name(r.solution.status)}; }

Verdict c1_scalar() {
  const auto& r = solve_config("scalar_transfer");
  if (!r.optimal()) return not_optimal(r);
  const double err = std::abs(r.solution.primal_objective - 1.0);
  return {err <= 1e-4 && r.seconds < 5.0, "objective " + f(r.solution.primal_objective, 10) + ", |err| " + f(err) +
                                              " (<= 1e-4), " + f(r.seconds, 3) + " s (< 5 s)"};
}

Verdict c2_double_integrator() {
  const auto& r = solve_config("double_integrator");
  if (!r.optimal()) return not_optimal(r);
  const double rel = std::abs(r.solution.primal_objective - 12.0) / 12.0;
  return {rel <= 0.01 && r.seconds < 60.0 && all_runs.back().cfg.scenario.degree == 6,
          "objective " + f(r.solution.primal_objective, 10) + ", rel err " + f(rel) + " (<= 1%), " +
              f(r.seconds, 3) + " s (< 60 s)"};
}

Verdict c3_ou() {
  const auto& r = solve_config("ou_validation");
  const auto& scn = all_runs.back().cfg.scenario;
  const double sigma2 = 2.0 * scn.dynamics.diffusion(0, 0), x0 = scn.initial.point(0);
  if (!r.optimal()) return not_optimal(r);
  const bool setup = scn.phases == 8 && scn.degree == 6 && sigma2 == 0.5 && x0 == 1.0 &&
                     scn.dynamics.horizon == 2.0 && scn.terminal.is_free() && scn.cost.is_zero();
  const auto tr = interface_statistics(r.solution, r.program, r.transform);
  double wm = 0.0, wv = 0.0;
  for (const auto& b : tr.breakpoints) {
    const double m = oracle::ou_mean(b.t, x0);
    wm = std::max(wm, std::abs(b.mean(0) - m) / std::abs(m));
    if (b.t > 0) {
      const double v = oracle::ou_var(b.t, sigma2);
      wv = std::max(wv, std::abs(b.covariance(0, 0) - v) / v);
    }
  }
  return {setup && wm <= 0.02 && wv <= 0.05,
          "K=8 d=6: max rel err mean " + f(wm) + " (<= 2%), variance " + f(wv) + " (<= 5%)"};
}

Verdict c4_weak_residual() {
  const RunConfig cfg = load_config((fs::path(config_dir) / "ou_validation.json").string());
  const auto prog = assemble_primal(cfg.scenario);
  const double r = oracle::ou_weak_residual(prog, 2.0 * cfg.scenario.dynamics.diffusion(0, 0),
                                            cfg.scenario.initial.point(0));
  return {r < 1e-8, "max |Ax - b| over " + std::to_string(prog.constraint_map.size()) +
                        " Fokker-Planck rows and mass rows: " + f(r) + " (< 1e-8)"};
}

Verdict c5_hierarchy() {
  double prev = -INFINITY, worst = 0.0;
  std::string vals;
  bool ok = true;
  for (int d : {2, 4, 6}) {
    const auto& r = solve_config("double_integrator", [d](RunConfig& c) { c.scenario.degree = d; },
                                 "double_integrator_d" + std::to_string(d));
    if (!r.optimal()) return not_optimal(r);
    const double v = r.solution.primal_objective;
    if (prev > -INFINITY) worst = std::max(worst, prev - v);
    ok = ok && v >= prev - 1e-6;
    vals += (vals.empty() ? "" : " <= ") + f(v, 8);
    prev = v;
  }
  return {ok, "d=2,4,6: " + vals + ", max violation " + f(std::max(worst, 0.0)) + " (< 1e-6)"};
}

Verdict c6_duality() {
  bool ok = true;
  int n = 0;
  double worst = -INFINITY;
  for (const auto& s : all_runs) {
    if (!s.run.optimal()) continue;
    ++n;
    const double excess = s.run.solution.dual_objective - s.run.solution.primal_objective;
    worst = std::max(worst, excess);
    ok = ok && excess <= 10 * s.cfg.solver.tol;
  }
  double gap12 = 0.0;
  for (const auto& s : all_runs)
    if (s.label == "scalar_transfer" || s.label == "double_integrator") {
      gap12 = std::max(gap12, rel_gap(s.run.solution));
      ok = ok && s.run.optimal();
    }
  ok = ok && gap12 < 1e-4 && n > 0;
  return {ok, std::to_string(n) + " optimal solves, max (dual - primal) " + f(worst) +
                  " (<= 10 tol); rel gap on criteria 1-2 " + f(gap12) + " (< 1e-4)"};
}

Verdict c7_trace() {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const int dc = 2 + rep % 3, dim = 1 + (rep / 3) % 3;
    const int side = static_cast<int>(basis_size(dim, dc));
    std::vector<Eigen::VectorXd> pts;
    for (int i = 0; i < 3 * side; ++i) {
      Eigen::VectorXd v(dim);
      for (int k = 0; k < dim; ++k) v(k) = U(rng);
      pts.push_back(v);
    }
    const auto m = empirical_moment_matrix(make_sample_set(pts), dc, 0.0);
    const auto L = christoffel_poly(m);
    double mean = 0.0;
    for (const auto& z : pts) mean += L.evaluate(std::span<const double>(z.data(), static_cast<size_t>(dim)));
    mean /= static_cast<double>(pts.size());
    worst = std::max(worst, std::abs(mean - side) / side);
  }
  return {worst < 1e-6, "20 sets, N = 3s, d_c in {2,3,4}, eps = 0: max |mean Lambda - s| / s = " + f(worst) +
                            " (< 1e-6)"};
}

struct ObstacleStats {
  double max_trace = 0.0;
  double min_g = INFINITY;
};

ObstacleStats obstacle_stats(const PipelineRun& r, const ScenarioSpec& physical) {
  ObstacleStats s;
  const auto tr = interface_statistics(r.solution, r.program, r.transform);
  const auto& sp = physical.space();
  const auto xs = sp.indices(BlockKind::state);
  for (const auto& b : tr.breakpoints) {
    s.max_trace = std::max(s.max_trace, b.covariance.trace());
    std::vector<double> z(static_cast<size_t>(sp.size()), 0.0);
    z[static_cast<size_t>(sp.offset(BlockKind::time))] = b.t;
    for (size_t i = 0; i < xs.size(); ++i) z[static_cast<size_t>(xs[i])] = b.mean(static_cast<Eigen::Index>(i));
    for (const auto& g : physical.state_support.inequalities) s.min_g = std::min(s.min_g, g.evaluate(z));
  }
  return s;
}

Verdict c8_obstacle() {
  const auto& det = solve_config("obstacle_deterministic");
  const ScenarioSpec det_scn = all_runs.back().cfg.scenario;
  const auto& sto = solve_config("obstacle_stochastic");
  const ScenarioSpec sto_scn = all_runs.back().cfg.scenario;
  if (!det.optimal()) return not_optimal(det);
  if (!sto.optimal()) return not_optimal(sto);
  const bool same = det_scn.dynamics.diffusion.isZero() &&
                    (sto_scn.dynamics.diffusion - 0.3 * Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0;
  const auto a = obstacle_stats(det, det_scn), b = obstacle_stats(sto, sto_scn);
  return {same && a.max_trace <= 1e-4 && b.max_trace > 0.0 && a.min_g >= -1e-3 && b.min_g >= -1e-3,
          "D=0: max tr cov " + f(a.max_trace) + " (<= 1e-4), min g(mean) " + f(a.min_g) +
              "; D=0.3I: max tr cov " + f(b.max_trace) + " (> 0), min g(mean) " + f(b.min_g) + " (>= -1e-3)"};
}

double expected_running_cost(const PipelineRun& r) {
  double total = 0.0;
  for (const auto& p : interface_statistics(r.solution, r.program, r.transform).phases) total += p.expected_cost;
  return total;
}

Verdict c9_christoffel() {
  const auto& det = solve_config("christoffel_double_integrator_deterministic");
  const auto& sto = solve_config("christoffel_double_integrator_stochastic");
  if (!det.optimal()) return not_optimal(det);
  if (!sto.optimal()) return not_optimal(sto);
  const double c0 = expected_running_cost(det), c1 = expected_running_cost(sto);
  return {c1 >= c0 - 1e-4, "expected running cost D=0: " + f(c0, 8) + ", D=0.03I: " + f(c1, 8) + " (>= D=0 - 1e-4)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Verdict c10_determinism() {
  const fs::path tmp = fs::temp_directory_path() / "momentfp_acceptance";
  fs::remove_all(tmp);
  int configs = 0;
  std::vector<std::string> differing;
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(config_dir))
    if (e.path().extension() == ".json") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    std::string out[2];
    bool solved = true;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = tmp / p.stem() / std::to_string(rep);
      std::ostringstream o, e;
      SolveOptions opts;
      opts.output_prefix = dir.string();
      opts.quiet = true;
      if (cmd_solve(p.string(), opts, o, e) != 0) {
        solved = false;
        break;
      }
      for (const char* file : {"stats.csv", "phases.csv", "value_fn.txt", "summary.json"}) out[rep] += slurp(dir / file);
    }
    if (!solved) continue;  // e.g. the deliberately infeasible example
    ++configs;
    if (out[0] != out[1]) differing.push_back(p.stem().string());
  }
  fs::remove_all(tmp);
  std::string detail = std::to_string(configs) + " shipped configs solved twice, ";
  detail += differing.empty() ? "all outputs byte-identical" : "differences in:";
  for (const auto& d : differing) detail += " " + d;
  return {differing.empty() && configs > 0, detail};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) config_dir = argv[1];
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"scalar transfer oracle", c1_scalar},
      {"double integrator oracle", c2_double_integrator},
      {"OU moment reproduction", c3_ou},
      {"Fokker-Planck weak residual", c4_weak_residual},
      {"hierarchy monotonicity", c5_hierarchy},
      {"weak and strong duality", c6_duality},
      {"Christoffel trace identity", c7_trace},
      {"obstacle: deterministic vs stochastic", c8_obstacle},
      {"Christoffel cost scenario", c9_christoffel},
      {"determinism of solve outputs", c10_determinism},
  };
  // Criterion 6 sweeps the solves of all other criteria, so it runs last.
  std::vector<Verdict> verdicts(criteria.size());
  std::vector<double> seconds(criteria.size());
  auto run_one = [&](size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      verdicts[i] = criteria[i].second();
    } catch (const std::exception& e) {
      verdicts[i] = {false, std::string("error: ") + e.what()};
    }
    seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  for (size_t i = 0; i < criteria.size(); ++i)
    if (i != 5) run_one(i);
  run_one(5);

  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    char head[128];
    std::snprintf(head, sizeof head, "[%s] %2zu %-38s %7.1fs  ", verdicts[i].pass ? "PASS" : "FAIL", i + 1,
                  criteria[i].first.c_str(), seconds[i]);
    std::cout << head << verdicts[i].detail << "\n";
    failed += !verdicts[i].pass;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << "\n";
  return failed ? 1 : 0;
}
