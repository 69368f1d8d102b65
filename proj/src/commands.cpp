#include "momentfp/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <ostream>

#include "momentfp/checks.hpp"
#include "momentfp/christoffel.hpp"
#include "momentfp/config.hpp"
#include "momentfp/postprocess.hpp"
#include "momentfp/scenarios.hpp"

namespace mfp {

namespace {

std::string g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// Summarizes a primal infeasibility certificate y (b'y = 1, A'y <= 0 on the
// cones): the PSD block carrying most of its weight names the culprit.
void print_certificate(const PipelineRun& run, std::ostream& out) {
  const auto& p = run.program.conic;
  const auto& s = run.solution;
  if (s.status == SolveStatus::dual_infeasible) {
    out << "certificate: improving ray with c'x = " << g12(s.primal_objective) << ", ||Ax||_inf = "
        << sci((p.A * s.primal).cwiseAbs().maxCoeff()) << "\n";
    return;
  }
  const ResidualReport rep = self_check(p, s);
  out << "certificate: b'y = " << g12(p.b.dot(s.equality_multipliers)) << ", min eig of -A'y over cones = "
      << sci(rep.min_dual_eig) << "\n";
  int offset = 0, best = -1;
  double best_w = 0.0;
  for (size_t i = 0; i < p.cones.size(); ++i) {
    const int dim = p.cones[i].dim();
    if (p.cones[i].kind == Cone::Kind::psd) {
      const double w = s.cone_duals.segment(offset, dim).norm();
      if (w > best_w) {
        best_w = w;
        best = static_cast<int>(i);
      }
    }
    offset += dim;
  }
  if (best > 0) out << "dominant block: " << run.program.psd_labels[static_cast<size_t>(best - 1)] << "\n";
}

}  // namespace

int cmd_solve(const std::string& config_path, const SolveOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  }
  if (opts.output_prefix) cfg.output_prefix = *opts.output_prefix;
  if (!opts.quiet)
    for (const auto& w : cfg.warnings) err << "warning: " << w << "\n";

  PipelineRun run;
  try {
    run = run_pipeline(cfg.scenario, cfg.solver);
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  }
  const auto& sol = run.solution;
  const auto& prog = run.program;
  out << "scenario: " << cfg.name << "\n";
  out << "program: " << prog.conic.num_vars << " variables, " << prog.conic.num_rows() << " rows, "
      << prog.psd_labels.size() << " PSD blocks\n";
  out << "status: " << status_name(sol.status) << "\n";
  out << "residuals: primal " << sci(sol.residuals.primal) << ", dual " << sci(sol.residuals.dual) << ", gap "
      << sci(sol.residuals.gap) << "\n";
  out << "wall time: " << std::fixed << std::setprecision(2) << run.seconds << " s\n" << std::defaultfloat;

  switch (sol.status) {
    case SolveStatus::optimal:
      break;
    case SolveStatus::primal_infeasible:
    case SolveStatus::dual_infeasible:
      print_certificate(run, out);
      return 2;
    default:
      out << "objective: " << g12(sol.primal_objective) << " (not certified)\n";
      return 3;
  }

  const auto trace = interface_statistics(sol, prog, run.transform);
  const auto vf = recover_value_function(sol, prog, run.transform);
  out << "objective: " << g12(sol.primal_objective) << "\n";
  out << "dual objective: " << g12(vf.dual_objective) << "\n";
  double worst = INFINITY;
  for (double v : vf.min_dual_slack)
    if (std::isfinite(v)) worst = std::min(worst, v);
  out << "min dual slack on grid: " << g12(worst) << "\n";

  RunSummary summary;
  summary.scenario = cfg.name;
  summary.status = status_name(sol.status);
  summary.primal_objective = sol.primal_objective;
  summary.dual_objective = vf.dual_objective;
  summary.residuals = sol.residuals;
  summary.iterations = sol.iterations;
  summary.variables = prog.conic.num_vars;
  summary.rows = prog.conic.num_rows();
  summary.psd_blocks = static_cast<int>(prog.psd_labels.size());
  try {
    export_trace(trace, vf, summary, cfg.output_prefix);
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << "\n";
    return 1;
  }
  out << "outputs: " << cfg.output_prefix << "/{stats.csv,phases.csv,value_fn.txt,summary.json}\n";
  return 0;
}

int cmd_fit_christoffel(const FitOptions& opts, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  try {
    const SampleSet s = load_samples(opts.csv, opts.columns);
    for (const auto& w : s.warnings) err << "warning: " << w << "\n";
    const auto m = empirical_moment_matrix(s, opts.degree, opts.epsilon ? *opts.epsilon : -1.0);
    const Polynomial L = christoffel_poly(m);

    fs::create_directories(opts.out_dir);
    const fs::path dir(opts.out_dir);
    std::ofstream(dir / "lambda.txt") << L.to_string(12) << "\n";

    nlohmann::ordered_json j;
    j["source"] = s.source;
    j["columns"] = s.columns;
    j["degree"] = opts.degree;
    j["epsilon"] = std::stod(g12(m.epsilon));
    j["samples"] = s.samples.size();
    j["basis_size"] = m.side();
    auto vec = [](const Eigen::VectorXd& v) {
      std::vector<double> o;
      for (Eigen::Index i = 0; i < v.size(); ++i) o.push_back(std::stod(g12(v(i))));
      return o;
    };
    j["offset"] = vec(s.offset);
    j["scale"] = vec(s.scale);
    j["variables"] = "x_i = (column_i - offset_i) / scale_i";
    std::ofstream(dir / "normalization.json") << j.dump(2) << "\n";

    {
      std::ofstream g(dir / "samples.csv");
      for (int k = 0; k < s.dimension; ++k) g << "x" << k + 1 << ",";
      g << "lambda\n";
      for (const auto& z : s.samples) {
        for (int k = 0; k < s.dimension; ++k) g << g12(z(k)) << ",";
        g << g12(L.evaluate(std::span<const double>(z.data(), static_cast<size_t>(z.size())))) << "\n";
      }
    }
    if (s.dimension <= 2) {
      std::ofstream g(dir / "grid.csv");
      const int n = std::max(2, opts.grid);
      auto coord = [&](int i) { return -1.0 + 2.0 * i / (n - 1); };
      if (s.dimension == 1) {
        g << "x1,lambda\n";
        for (int i = 0; i < n; ++i) {
          const double z[1] = {coord(i)};
          g << g12(z[0]) << "," << g12(L.evaluate(z)) << "\n";
        }
      } else {
        g << "x1,x2,lambda\n";
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < n; ++k) {
            const double z[2] = {coord(i), coord(k)};
            g << g12(z[0]) << "," << g12(z[1]) << "," << g12(L.evaluate(z)) << "\n";
          }
      }
    }
    out << "samples: " << s.samples.size() << ", basis size " << m.side() << ", epsilon " << g12(m.epsilon) << "\n";
    out << "lambda: " << L.to_string(12) << "\n";
    out << "outputs: " << opts.out_dir << "\n";
    return 0;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

int cmd_check(const CheckCommandOptions& opts, std::ostream& out, std::ostream& err) {
  CheckOptions co;
  co.filter = opts.filter;
  if (opts.tol) co.solver.tol = *opts.tol;
  std::vector<CheckResult> results;
  try {
    results = run_checks(co);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    char head[96];
    std::snprintf(head, sizeof head, "%-4s %-18s %7.2fs  ", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds);
    out << head << r.detail << "\n";
  }
  out << (all ? "all checks passed" : "some checks FAILED") << "\n";
  return all ? 0 : 3;
}

}  // namespace mfp
