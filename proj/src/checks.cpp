#include "momentfp/checks.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "momentfp/christoffel.hpp"
#include "momentfp/postprocess.hpp"
#include "momentfp/scenarios.hpp"

namespace mfp {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Solves shared between checks, keyed by scenario tag.
class RunCache {
 public:
  explicit RunCache(SolverSettings s) : settings_(s) {}

  const PipelineRun& get(const std::string& tag) {
    auto it = runs_.find(tag);
    if (it != runs_.end()) return it->second;
    return runs_.emplace(tag, run_pipeline(make(tag), settings_)).first->second;
  }

  const std::map<std::string, PipelineRun>& all() const { return runs_; }
  const SolverSettings& settings() const { return settings_; }

 private:
  static ScenarioSpec make(const std::string& tag) {
    if (tag == "scalar") return scalar_transfer_scenario(4, 1);
    if (tag == "scalar_k4") return scalar_transfer_scenario(4, 4);
    if (tag == "di2") return double_integrator_scenario(2, 1);
    if (tag == "di4") return double_integrator_scenario(4, 1);
    if (tag == "di6") return double_integrator_scenario(6, 1);
    if (tag == "ou") return ou_scenario(0.5, 1.0, 2.0, 6, 8);
    throw std::logic_error("unknown scenario tag " + tag);
  }

  SolverSettings settings_;
  std::map<std::string, PipelineRun> runs_;
};

bool gap_ok(const ConicSolution& s) {
  return std::abs(s.primal_objective - s.dual_objective) / std::max(1.0, std::abs(s.primal_objective)) < 1e-4;
}

CheckResult scalar_check(RunCache& cache) {
  const auto& r = cache.get("scalar");
  CheckResult c{"scalar_transfer", false, "", 0.0};
  if (!r.optimal()) {
    c.detail = std::string("status ") + status_name(r.solution.status);
    return c;
  }
  const double err = std::abs(r.solution.primal_objective - 1.0);
  c.pass = err <= 1e-4 && r.seconds < 5.0;
  c.detail = "objective " + fmt(r.solution.primal_objective) + " (oracle 1, |err| " + fmt(err) + "), solve " +
             fmt(r.seconds) + " s";
  return c;
}

CheckResult double_integrator_check(RunCache& cache) {
  const auto& r = cache.get("di6");
  CheckResult c{"double_integrator", false, "", 0.0};
  if (!r.optimal()) {
    c.detail = std::string("status ") + status_name(r.solution.status);
    return c;
  }
  const double rel = std::abs(r.solution.primal_objective - 12.0) / 12.0;
  c.pass = rel <= 0.01 && r.seconds < 60.0;
  c.detail = "objective " + fmt(r.solution.primal_objective) + " (oracle 12, rel err " + fmt(rel) + "), solve " +
             fmt(r.seconds) + " s";
  return c;
}

CheckResult ou_check(RunCache& cache) {
  const auto& r = cache.get("ou");
  CheckResult c{"ou_moments", false, "", 0.0};
  if (!r.optimal()) {
    c.detail = std::string("status ") + status_name(r.solution.status);
    return c;
  }
  const auto tr = interface_statistics(r.solution, r.program, r.transform);
  double worst_mean = 0.0, worst_var = 0.0;
  for (const auto& b : tr.breakpoints) {
    const double m = ou_mean(b.t, 0.5, 1.0);
    worst_mean = std::max(worst_mean, std::abs(b.mean(0) - m) / std::abs(m));
    if (b.t > 0) {
      const double v = ou_second_moment(b.t, 0.5, 1.0) - m * m;
      worst_var = std::max(worst_var, std::abs(b.covariance(0, 0) - v) / v);
    }
  }
  c.pass = worst_mean <= 0.02 && worst_var <= 0.05;
  c.detail = "max rel err mean " + fmt(worst_mean) + " (<= 0.02), variance " + fmt(worst_var) + " (<= 0.05)";
  return c;
}

CheckResult trace_check() {
  CheckResult c{"christoffel_trace", true, "", 0.0};
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const int dim = 1 + rep % 2, dc = 2 + rep % 3;
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
  c.pass = worst < 1e-6;
  c.detail = "20 sample sets, max rel deviation " + fmt(worst) + " (< 1e-6)";
  return c;
}

CheckResult duality_gap_check(RunCache& cache) {
  CheckResult c{"duality_gap", true, "", 0.0};
  for (const char* tag : {"scalar", "di6"}) {
    const auto& r = cache.get(tag);
    const double gap = std::abs(r.solution.primal_objective - r.solution.dual_objective) /
                       std::max(1.0, std::abs(r.solution.primal_objective));
    if (!r.optimal() || !gap_ok(r.solution)) c.pass = false;
    c.detail += std::string(c.detail.empty() ? "" : ", ") + tag + " rel gap " + fmt(gap);
  }
  c.detail += " (< 1e-4)";
  return c;
}

CheckResult weak_duality_check(RunCache& cache) {
  for (const char* tag : {"scalar", "scalar_k4", "di2", "di4", "di6", "ou"}) cache.get(tag);
  CheckResult c{"weak_duality", true, "", 0.0};
  int solves = 0;
  double worst = -INFINITY;
  for (const auto& [tag, r] : cache.all()) {
    if (!r.optimal()) continue;
    ++solves;
    const double excess = r.solution.dual_objective - r.solution.primal_objective;
    worst = std::max(worst, excess);
    if (excess > 10 * cache.settings().tol) c.pass = false;
  }
  if (solves == 0) c.pass = false;
  c.detail = std::to_string(solves) + " optimal solves, max dual - primal " + fmt(worst) + " (<= 10 tol)";
  return c;
}

CheckResult hierarchy_check(RunCache& cache) {
  CheckResult c{"hierarchy", true, "", 0.0};
  double prev = -INFINITY;
  for (const char* tag : {"di2", "di4", "di6"}) {
    const auto& r = cache.get(tag);
    if (!r.optimal()) {
      c.pass = false;
      c.detail += std::string(" ") + tag + ":" + status_name(r.solution.status);
      continue;
    }
    const double v = r.solution.primal_objective;
    if (v < prev - 1e-6) c.pass = false;
    c.detail += std::string(c.detail.empty() ? "" : " <= ") + fmt(v);
    prev = v;
  }
  c.detail = "double integrator d=2,4,6: " + c.detail;
  return c;
}

using CheckFn = std::function<CheckResult(RunCache&)>;

const std::vector<std::pair<std::string, CheckFn>>& registry() {
  static const std::vector<std::pair<std::string, CheckFn>> r = {
      {"scalar_transfer", scalar_check},
      {"double_integrator", double_integrator_check},
      {"ou_moments", ou_check},
      {"christoffel_trace", [](RunCache&) { return trace_check(); }},
      {"duality_gap", duality_gap_check},
      {"weak_duality", weak_duality_check},
      {"hierarchy", hierarchy_check},
  };
  return r;
}

bool selected(const std::string& name, const std::string& filter) {
  if (filter.empty()) return true;
  std::istringstream is(filter);
  std::string tok;
  while (std::getline(is, tok, ','))
    if (!tok.empty() && name.rfind(tok, 0) == 0) return true;
  return false;
}

}  // namespace

std::vector<std::string> check_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) out.push_back(name);
  return out;
}

std::vector<CheckResult> run_checks(const CheckOptions& opts) {
  RunCache cache(opts.solver);
  std::vector<CheckResult> out;
  for (const auto& [name, fn] : registry()) {
    if (!selected(name, opts.filter)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = fn(cache);
    } catch (const std::exception& e) {
      r = {name, false, std::string("error: ") + e.what(), 0.0};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  if (out.empty()) throw std::invalid_argument("no check matches filter '" + opts.filter + "'");
  return out;
}

}  // namespace mfp
