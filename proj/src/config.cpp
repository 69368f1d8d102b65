#include "momentfp/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace mfp {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, size_t i) { return path + "[" + std::to_string(i) + "]"; }

// Object view that rejects keys outside the schema on construction.
class Section {
 public:
  Section(const json& j, std::string path, std::initializer_list<const char*> allowed) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items())
      if (!ok.count(k)) throw ConfigError(join(path_, k), "unknown key");
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  std::string key(const char* k) const { return join(path_, k); }

  const json& need(const char* k) const {
    if (!has(k)) throw ConfigError(key(k), "required key is missing");
    return j_.at(k);
  }

  double number(const char* k) const { return as_number(need(k), key(k)); }
  double number(const char* k, double dflt) const { return has(k) ? number(k) : dflt; }

  int integer(const char* k) const {
    const json& v = need(k);
    if (!v.is_number_integer()) throw ConfigError(key(k), "expected an integer");
    return v.get<int>();
  }
  int integer(const char* k, int dflt) const { return has(k) ? integer(k) : dflt; }

  std::string string(const char* k) const {
    const json& v = need(k);
    if (!v.is_string()) throw ConfigError(key(k), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const char* k, const std::string& dflt) const { return has(k) ? string(k) : dflt; }

  std::vector<std::string> strings(const char* k) const {
    const json& v = need(k);
    if (!v.is_array()) throw ConfigError(key(k), "expected an array of strings");
    std::vector<std::string> out;
    for (size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) throw ConfigError(at(key(k), i), "expected a string");
      out.push_back(v[i].get<std::string>());
    }
    return out;
  }

  Eigen::VectorXd vector(const char* k, int expect = -1) const { return as_vector(need(k), key(k), expect); }

  Eigen::MatrixXd matrix(const char* k, int n) const {
    const json& v = need(k);
    if (!v.is_array() || static_cast<int>(v.size()) != n)
      throw ConfigError(key(k), "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) m.row(i) = as_vector(v[static_cast<size_t>(i)], at(key(k), static_cast<size_t>(i)), n).transpose();
    return m;
  }

  static double as_number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(key, "expected a finite number");
    return x;
  }

  static Eigen::VectorXd as_vector(const json& v, const std::string& key, int expect) {
    if (!v.is_array()) throw ConfigError(key, "expected an array of numbers");
    if (expect >= 0 && static_cast<int>(v.size()) != expect)
      throw ConfigError(key, "expected " + std::to_string(expect) + " entries, got " + std::to_string(v.size()));
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = as_number(v[i], at(key, i));
    return out;
  }

  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
};

Polynomial parse_poly(const json& v, const std::string& key, const VariableSpace& sp) {
  if (!v.is_string()) throw ConfigError(key, "expected a polynomial string");
  try {
    return Polynomial::parse(v.get<std::string>(), sp);
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
}

std::vector<Polynomial> parse_polys(const Section& s, const char* k, const VariableSpace& sp) {
  std::vector<Polynomial> out;
  if (!s.has(k)) return out;
  const json& v = s.need(k);
  if (!v.is_array()) throw ConfigError(s.key(k), "expected an array of polynomial strings");
  for (size_t i = 0; i < v.size(); ++i) out.push_back(parse_poly(v[i], at(s.key(k), i), sp));
  return out;
}

std::string resolve(const std::string& p, const std::string& base) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? p : (std::filesystem::path(base) / path).lexically_normal().string();
}

MeasureSpec parse_measure(const json& j, const std::string& path, int n, const std::string& base) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  if (!j.contains("kind")) throw ConfigError(join(path, "kind"), "required key is missing");
  if (!j.at("kind").is_string()) throw ConfigError(join(path, "kind"), "expected a string");
  const std::string kind = j.at("kind").get<std::string>();
  MeasureSpec m;
  if (kind == "dirac") {
    Section s(j, path, {"kind", "point"});
    m = MeasureSpec::make_dirac(s.vector("point", n));
  } else if (kind == "gaussian") {
    Section s(j, path, {"kind", "mean", "covariance"});
    m = MeasureSpec::make_gaussian(s.vector("mean", n), s.matrix("covariance", n));
  } else if (kind == "uniform_box") {
    Section s(j, path, {"kind", "lower", "upper"});
    m = MeasureSpec::make_uniform_box(s.vector("lower", n), s.vector("upper", n));
  } else if (kind == "empirical") {
    Section s(j, path, {"kind", "samples", "csv", "columns"});
    std::vector<Eigen::VectorXd> pts;
    if (s.has("samples") == s.has("csv")) throw ConfigError(path, "give exactly one of 'samples' or 'csv'");
    if (s.has("samples")) {
      const json& v = s.need("samples");
      if (!v.is_array()) throw ConfigError(s.key("samples"), "expected an array of points");
      for (size_t i = 0; i < v.size(); ++i) pts.push_back(Section::as_vector(v[i], at(s.key("samples"), i), n));
    } else {
      const auto cols = s.strings("columns");
      if (static_cast<int>(cols.size()) != n) throw ConfigError(s.key("columns"), "expected " + std::to_string(n) + " columns");
      try {
        const auto raw = load_samples(resolve(s.string("csv"), base), cols,
                                      NormalizationBox{-Eigen::VectorXd::Ones(n),
                                                       Eigen::VectorXd::Ones(n)});
        pts = raw.samples;  // the unit box makes this the identity map
      } catch (const DataError& e) {
        throw ConfigError(s.key("csv"), e.what());
      }
    }
    m = MeasureSpec::make_empirical(std::move(pts));
  } else if (kind == "free") {
    Section s(j, path, {"kind"});
    m = MeasureSpec::make_free(n);
  } else {
    throw ConfigError(join(path, "kind"), "unknown measure kind '" + kind + "'");
  }
  try {
    m.validate();
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  return m;
}

ChristoffelCostSpec parse_christoffel(const json& j, const std::string& path, const VariableSpace& sp,
                                      const std::string& base) {
  Section s(j, path, {"csv", "columns", "variables", "degree", "epsilon", "lambda_control", "box"});
  ChristoffelCostSpec c;
  c.csv = resolve(s.string("csv"), base);
  c.columns = s.strings("columns");
  if (c.columns.empty()) throw ConfigError(s.key("columns"), "at least one column is required");
  if (s.has("variables")) {
    c.variables = s.strings("variables");
  } else {
    for (size_t i = 0; i < c.columns.size(); ++i) c.variables.push_back("x" + std::to_string(i + 1));
  }
  if (c.variables.size() != c.columns.size()) throw ConfigError(s.key("variables"), "must match 'columns' in length");
  for (size_t i = 0; i < c.variables.size(); ++i) {
    const auto idx = sp.index_of(c.variables[i]);
    if (!idx || sp.kind_of(*idx) == BlockKind::time)
      throw ConfigError(at(s.key("variables"), i), "'" + c.variables[i] + "' is not a state or control variable");
  }
  c.degree = s.integer("degree", 4);
  if (c.degree < 0) throw ConfigError(s.key("degree"), "must be >= 0");
  if (s.has("epsilon")) {
    c.epsilon = s.number("epsilon");
    if (*c.epsilon < 0) throw ConfigError(s.key("epsilon"), "must be >= 0");
  }
  c.lambda_control = s.number("lambda_control", 0.0);
  if (c.lambda_control < 0) throw ConfigError(s.key("lambda_control"), "must be >= 0");
  if (s.has("box")) {
    Section b(s.need("box"), s.key("box"), {"lower", "upper"});
    const int k = static_cast<int>(c.columns.size());
    c.box = NormalizationBox{b.vector("lower", k), b.vector("upper", k)};
  }
  return c;
}

Polynomial christoffel_cost(const ChristoffelCostSpec& c, const VariableSpace& sp, const std::string& key) {
  try {
    const SampleSet samples = load_samples(c.csv, c.columns, c.box);
    const auto M = empirical_moment_matrix(samples, c.degree, c.epsilon ? *c.epsilon : -1.0);
    std::vector<int> target;
    for (const auto& v : c.variables) target.push_back(*sp.index_of(v));
    Polynomial cost = lift_christoffel(christoffel_poly(M), samples, sp, target);
    for (int u : sp.indices(BlockKind::control)) {
      Polynomial uu(sp);
      uu.add_term(ExponentVector::unit(sp.size(), u, 2), c.lambda_control);
      cost = cost + uu;
    }
    return cost;
  } catch (const DataError& e) {
    throw ConfigError(join(key, "csv"), e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  Section top(root, "", {"name", "description", "dynamics", "measures", "support", "cost", "relaxation", "solver", "output"});
  RunConfig cfg;
  cfg.name = top.string("name", "scenario");
  if (top.has("description")) top.string("description");
  ScenarioSpec& scn = cfg.scenario;

  Section dyn(top.need("dynamics"), "dynamics", {"states", "controls", "drift", "diffusion", "horizon"});
  const int n = dyn.integer("states");
  const int m = dyn.integer("controls", 0);
  if (n < 1) throw ConfigError(dyn.key("states"), "must be >= 1");
  if (m < 0) throw ConfigError(dyn.key("controls"), "must be >= 0");
  const auto sp = VariableSpace::make(n, m);
  scn.dynamics.space = sp;
  scn.dynamics.drift = parse_polys(dyn, "drift", sp);
  if (static_cast<int>(scn.dynamics.drift.size()) != n)
    throw ConfigError(dyn.key("drift"), "expected " + std::to_string(n) + " polynomials, one per state");
  if (!dyn.has("diffusion")) {
    scn.dynamics.diffusion = Eigen::MatrixXd::Zero(n, n);
  } else if (dyn.need("diffusion").is_number()) {
    scn.dynamics.diffusion = dyn.number("diffusion") * Eigen::MatrixXd::Identity(n, n);
  } else {
    scn.dynamics.diffusion = dyn.matrix("diffusion", n);
  }
  scn.dynamics.horizon = dyn.number("horizon", 1.0);
  try {
    scn.dynamics.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("dynamics", e.what());
  }

  Section meas(top.need("measures"), "measures", {"initial", "terminal"});
  scn.initial = parse_measure(meas.need("initial"), "measures.initial", n, base_dir);
  scn.terminal = parse_measure(meas.need("terminal"), "measures.terminal", n, base_dir);

  if (top.has("support")) {
    Section sup(top.need("support"), "support", {"state", "control", "terminal"});
    scn.state_support.inequalities = parse_polys(sup, "state", sp);
    scn.control_support.inequalities = parse_polys(sup, "control", sp);
    scn.terminal_support.inequalities = parse_polys(sup, "terminal", sp);
  }

  Section cost(top.need("cost"), "cost", {"running", "terminal", "christoffel"});
  scn.cost = cost.has("running") ? parse_poly(cost.need("running"), cost.key("running"), sp) : Polynomial(sp);
  if (cost.has("christoffel")) {
    cfg.christoffel = parse_christoffel(cost.need("christoffel"), cost.key("christoffel"), sp, base_dir);
    scn.cost = scn.cost + christoffel_cost(*cfg.christoffel, sp, cost.key("christoffel"));
  } else if (!cost.has("running")) {
    throw ConfigError("cost", "give 'running' and/or 'christoffel'");
  }
  if (cost.has("terminal")) scn.terminal_cost = parse_poly(cost.need("terminal"), cost.key("terminal"), sp);

  Section rel(top.need("relaxation"), "relaxation", {"degree", "phases", "scaling_box"});
  scn.degree = rel.integer("degree");
  scn.phases = rel.integer("phases", 1);
  if (rel.has("scaling_box")) {
    Section box(rel.need("scaling_box"), rel.key("scaling_box"), {"state_lower", "state_upper", "control_lower", "control_upper"});
    ScalingBox b;
    b.state_lower = box.vector("state_lower", n);
    b.state_upper = box.vector("state_upper", n);
    b.control_lower = m ? box.vector("control_lower", m) : Eigen::VectorXd();
    b.control_upper = m ? box.vector("control_upper", m) : Eigen::VectorXd();
    if (!m && (box.has("control_lower") || box.has("control_upper")))
      throw ConfigError(box.key("control_lower"), "scenario has no controls");
    scn.box = b;
  }

  if (top.has("solver")) {
    Section sol(top.need("solver"), "solver", {"tol", "max_iters", "verbosity"});
    cfg.solver.tol = sol.number("tol", cfg.solver.tol);
    cfg.solver.max_iters = sol.integer("max_iters", cfg.solver.max_iters);
    cfg.solver.verbosity = sol.integer("verbosity", 0);
    if (!(cfg.solver.tol > 0)) throw ConfigError(sol.key("tol"), "must be > 0");
    if (cfg.solver.max_iters < 1) throw ConfigError(sol.key("max_iters"), "must be >= 1");
  }

  cfg.output_prefix = "out/" + cfg.name;
  if (top.has("output")) {
    Section out(top.need("output"), "output", {"prefix"});
    cfg.output_prefix = out.string("prefix", cfg.output_prefix);
  }

  try {
    scn.validate();
    if (scn.box) scale_scenario(scn);
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    throw ConfigError(msg.rfind("scaling box", 0) == 0 ? "relaxation.scaling_box" : "", msg);
  }
  if (!scn.box) cfg.warnings.push_back("no relaxation.scaling_box declared; only time is rescaled");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  const auto base = std::filesystem::path(path).parent_path();
  return parse_config(os.str(), base.empty() ? "." : base.string());
}

}  // namespace mfp
