#include "momentfp/postprocess.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <json.hpp>
#include <stdexcept>

#include "momentfp/generator.hpp"

namespace mfp {

namespace {

void require_optimal(const ConicSolution& sol, const char* what) {
  if (sol.status != SolveStatus::optimal)
    throw std::invalid_argument(std::string(what) + ": solution status is " + status_name(sol.status));
}

}  // namespace

StatisticsTrace interface_statistics(const ConicSolution& sol, const AssembledProgram& prog,
                                     const AffineTransform& transform) {
  require_optimal(sol, "interface_statistics");
  const auto& sp = prog.scenario.space();
  const auto xs = sp.indices(BlockKind::state);
  const int n = static_cast<int>(xs.size());
  const ExponentVector zero(sp.size());

  StatisticsTrace tr;
  for (int k = 0; k <= prog.phases(); ++k) {
    const MomentVector y = prog.moments(sol.primal, prog.interface_slot(k));
    BreakpointStats b;
    b.t = transform.time_to_physical(prog.breakpoints[static_cast<size_t>(k)]);
    b.mass = y.at(zero);
    Eigen::VectorXd m(n);
    Eigen::MatrixXd S(n, n);
    for (int i = 0; i < n; ++i) {
      m(i) = y.at(ExponentVector::unit(sp.size(), xs[static_cast<size_t>(i)])) / b.mass;
      for (int j = 0; j < n; ++j)
        S(i, j) = y.at(ExponentVector::unit(sp.size(), xs[static_cast<size_t>(i)]) +
                       ExponentVector::unit(sp.size(), xs[static_cast<size_t>(j)])) /
                  b.mass;
    }
    const Eigen::MatrixXd cov = S - m * m.transpose();
    b.mean = transform.state_to_physical(m);
    b.covariance = transform.covariance_to_physical(cov);
    b.second_moment = b.covariance + b.mean * b.mean.transpose();
    tr.breakpoints.push_back(std::move(b));
  }
  for (int k = 1; k <= prog.phases(); ++k) {
    const MomentVector y = prog.moments(sol.primal, prog.occupation_slot(k));
    PhaseStats p;
    p.t_start = transform.time_to_physical(prog.breakpoints[static_cast<size_t>(k - 1)]);
    p.t_end = transform.time_to_physical(prog.breakpoints[static_cast<size_t>(k)]);
    p.occupation_mass = transform.horizon * y.at(zero);
    p.expected_cost = y.pair(prog.scenario.cost);
    tr.phases.push_back(p);
  }
  return tr;
}

std::vector<double> halton(long index, int dim) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (dim > static_cast<int>(std::size(primes))) throw std::invalid_argument("halton: dimension too large");
  std::vector<double> out(static_cast<size_t>(dim));
  for (int d = 0; d < dim; ++d) {
    const int base = primes[d];
    double f = 1.0, r = 0.0;
    for (long i = index; i > 0; i /= base) {
      f /= base;
      r += f * static_cast<double>(i % base);
    }
    out[static_cast<size_t>(d)] = r;
  }
  return out;
}

ValueFunctionEstimate recover_value_function(const ConicSolution& sol, const AssembledProgram& prog,
                                             const AffineTransform& transform, int grid_points) {
  require_optimal(sol, "recover_value_function");
  const auto& scn = prog.scenario;
  const auto& sp = scn.space();
  const int K = prog.phases();
  ValueFunctionEstimate vf;
  vf.scaled_phases.assign(static_cast<size_t>(K), Polynomial(sp));
  for (const auto& [key, row] : prog.constraint_map)
    vf.scaled_phases[static_cast<size_t>(key.first - 1)].add_term(key.second, sol.equality_multipliers(row));
  for (const auto& v : vf.scaled_phases) vf.phases.push_back(transform.to_physical(v));
  vf.dual_objective = prog.conic.b.dot(sol.equality_multipliers) + prog.conic.objective_offset;

  const int dim = sp.size();
  const int t_idx = sp.offset(BlockKind::time);
  for (int k = 1; k <= K; ++k) {
    const Polynomial slack = apply_generator(vf.scaled_phases[static_cast<size_t>(k - 1)], scn.dynamics) + scn.cost;
    const double t0 = prog.breakpoints[static_cast<size_t>(k - 1)], t1 = prog.breakpoints[static_cast<size_t>(k)];
    double worst = std::numeric_limits<double>::infinity();
    int used = 0;
    std::vector<double> z(static_cast<size_t>(dim));
    for (long i = 1; i <= grid_points; ++i) {
      const auto h = halton(i, dim);
      for (int j = 0; j < dim; ++j)
        z[static_cast<size_t>(j)] = j == t_idx ? t0 + (t1 - t0) * h[static_cast<size_t>(j)]
                                               : -1.0 + 2.0 * h[static_cast<size_t>(j)];
      if (!scn.state_support.contains(z) || !scn.control_support.contains(z)) continue;
      ++used;
      worst = std::min(worst, slack.evaluate(z));
    }
    // The scaled problem carries L' = T L and c' = T c.
    vf.min_dual_slack.push_back(used ? worst / transform.horizon : std::numeric_limits<double>::quiet_NaN());
    vf.grid_points_used.push_back(used);
  }
  return vf;
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// 12 significant digits inside the JSON summary too, for byte-stable output.
double round12(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(num(v));
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

}  // namespace

void export_trace(const StatisticsTrace& trace, const ValueFunctionEstimate& vf, const RunSummary& summary,
                  const std::string& prefix) {
  namespace fs = std::filesystem;
  const fs::path dir(prefix);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());

  const int n = trace.breakpoints.empty() ? 0 : static_cast<int>(trace.breakpoints.front().mean.size());
  {
    auto out = open_out(dir / "stats.csv");
    out << "t,mass";
    for (int i = 0; i < n; ++i) out << ",mean_x" << i + 1;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) out << ",cov_x" << i + 1 << "_x" << j + 1;
    out << "\n";
    for (const auto& b : trace.breakpoints) {
      out << num(b.t) << "," << num(b.mass);
      for (int i = 0; i < n; ++i) out << "," << num(b.mean(i));
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) out << "," << num(b.covariance(i, j));
      out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + (dir / "stats.csv").string());
  }
  {
    auto out = open_out(dir / "phases.csv");
    out << "phase,t_start,t_end,occupation_mass,expected_cost,min_dual_slack\n";
    for (size_t k = 0; k < trace.phases.size(); ++k) {
      const auto& p = trace.phases[k];
      out << k + 1 << "," << num(p.t_start) << "," << num(p.t_end) << "," << num(p.occupation_mass) << ","
          << num(p.expected_cost) << "," << (k < vf.min_dual_slack.size() ? num(vf.min_dual_slack[k]) : "nan")
          << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + (dir / "phases.csv").string());
  }
  {
    auto out = open_out(dir / "value_fn.txt");
    for (size_t k = 0; k < vf.phases.size(); ++k) {
      const auto& p = trace.phases.at(k);
      out << "phase " << k + 1 << " [" << num(p.t_start) << ", " << num(p.t_end) << "]: " << vf.phases[k].to_string(12)
          << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + (dir / "value_fn.txt").string());
  }
  {
    nlohmann::ordered_json j;
    j["scenario"] = summary.scenario;
    j["status"] = summary.status;
    j["primal_objective"] = round12(summary.primal_objective);
    j["dual_objective"] = round12(summary.dual_objective);
    j["residuals"] = {{"primal", round12(summary.residuals.primal)},
                      {"dual", round12(summary.residuals.dual)},
                      {"gap", round12(summary.residuals.gap)}};
    j["iterations"] = summary.iterations;
    j["program"] = {{"variables", summary.variables}, {"rows", summary.rows}, {"psd_blocks", summary.psd_blocks}};
    j["phases"] = static_cast<int>(trace.phases.size());
    auto slack = nlohmann::json::array();
    for (double v : vf.min_dual_slack) slack.push_back(std::isfinite(v) ? nlohmann::json(round12(v)) : nlohmann::json());
    j["min_dual_slack"] = slack;
    auto out = open_out(dir / "summary.json");
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + (dir / "summary.json").string());
  }
}

}  // namespace mfp
