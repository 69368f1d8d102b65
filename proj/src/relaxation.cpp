#include "momentfp/relaxation.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mfp {

void ScenarioSpec::validate() const {
  dynamics.validate();
  const auto& sp = dynamics.space;
  const int n = dynamics.state_dim();
  if (degree < 2 || degree % 2 != 0)
    throw std::invalid_argument("scenario: relaxation degree must be an even integer >= 2, got " +
                                std::to_string(degree));
  if (phases < 1) throw std::invalid_argument("scenario: number of phases must be positive");
  if (initial.is_free()) throw std::invalid_argument("scenario: initial measure must be given");
  if (terminal.is_free() && terminal_support.empty())
    throw std::invalid_argument("scenario: a free terminal measure needs a terminal support");
  initial.validate();
  terminal.validate();
  if (initial.dimension != n || terminal.dimension != n)
    throw std::invalid_argument("scenario: boundary measure dimension differs from state dimension " +
                                std::to_string(n));
  if (!(cost.space() == sp)) throw std::invalid_argument("scenario: cost polynomial space mismatch");
  if (terminal_cost) {
    if (!(terminal_cost->space() == sp)) throw std::invalid_argument("scenario: terminal cost space mismatch");
    if (terminal_cost->depends_on(BlockKind::time) || terminal_cost->depends_on(BlockKind::control))
      throw std::invalid_argument("scenario: terminal cost may only depend on the state");
  }
  auto check_set = [&](const SupportSet& s, const char* what, bool state_only) {
    for (const auto& g : s.inequalities) {
      if (!(g.space() == sp)) throw std::invalid_argument(std::string("scenario: ") + what + " space mismatch");
      if (state_only && (g.depends_on(BlockKind::time) || g.depends_on(BlockKind::control)))
        throw std::invalid_argument(std::string("scenario: ") + what + " may only depend on the state");
    }
  };
  check_set(state_support, "state support", false);
  check_set(control_support, "control support", false);
  check_set(terminal_support, "terminal support", true);
}

std::string MeasureRef::label() const {
  return (role == Role::occupation ? "mu" : "nu") + std::to_string(index);
}

MomentVector AssembledProgram::moments(const Eigen::VectorXd& primal, int slot) const {
  const auto& m = measures.at(static_cast<size_t>(slot));
  if (m.fixed) return *m.fixed;
  MomentVector y(scenario.space(), m.blocks, scenario.degree);
  for (int i = 0; i < y.size(); ++i) y.values()(i) = primal(m.first_var + i);
  return y;
}

namespace {

using Row = std::map<int, double>;

class Builder {
 public:
  explicit Builder(AssembledProgram& out) : out_(out) {}

  int new_row(double rhs = 0.0) {
    rows_.emplace_back();
    rhs_.push_back(rhs);
    return static_cast<int>(rows_.size()) - 1;
  }
  void add(int row, int col, double v) {
    if (v == 0.0) return;
    rows_[static_cast<size_t>(row)][col] += v;
  }
  double& rhs(int row) { return rhs_[static_cast<size_t>(row)]; }

  // Adds coefficient `c` times the moment `e` of measure `slot` to `row`:
  // a variable for free measures, a right-hand-side shift for fixed ones.
  void add_moment(int row, int slot, const ExponentVector& e, double c) {
    const auto& m = out_.measures[static_cast<size_t>(slot)];
    if (m.fixed) {
      const int idx = m.fixed->index_of(e);
      if (idx < 0) throw std::logic_error("relaxation: moment outside fixed truncation");
      rhs(row) -= c * m.fixed->values()(idx);
      return;
    }
    const auto it = out_.index_map.find({slot, e});
    if (it == out_.index_map.end()) throw std::logic_error("relaxation: moment outside measure truncation");
    add(row, it->second, c);
  }

  // Links a new PSD slack to the localizing matrix of g on the measure in slot.
  void localizer(int slot, const Polynomial& g, int order, const std::string& label) {
    const auto& m = out_.measures[static_cast<size_t>(slot)];
    const auto basis = enumerate_basis(out_.scenario.space(), order, m.blocks);
    const int side = static_cast<int>(basis.size());
    if (m.fixed) {
      // Fixed data: only a violated localizer needs to enter the program, as a
      // constant block whose infeasibility the solver then certifies.
      const Eigen::MatrixXd L = localizing_matrix(*m.fixed, g, order);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L, Eigen::EigenvaluesOnly);
      const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
      if (eig.eigenvalues().minCoeff() >= -1e-9 * scale) return;
    }
    const int first = cone_start();
    cones_.push_back({Cone::Kind::psd, side});
    out_.psd_labels.push_back(label);
    int k = 0;
    for (int j = 0; j < side; ++j)
      for (int i = j; i < side; ++i, ++k) {
        const double sc = i == j ? 1.0 : M_SQRT2;
        const int row = new_row();
        const ExponentVector base = basis[static_cast<size_t>(i)] + basis[static_cast<size_t>(j)];
        for (const auto& [gamma, gc] : g.terms()) add_moment(row, slot, base + gamma, sc * gc);
        add(row, first + k, -1.0);
      }
  }

  int cone_start() const {
    int n = free_vars_;
    for (const auto& c : cones_) n += c.dim();
    return n;
  }

  void set_free_vars(int n) { free_vars_ = n; }

  void finish(Eigen::VectorXd c_free, double offset) {
    auto& p = out_.conic;
    p.cones.clear();
    p.cones.push_back({Cone::Kind::free, free_vars_});
    for (const auto& c : cones_) p.cones.push_back(c);
    p.num_vars = cone_start();
    p.c = Eigen::VectorXd::Zero(p.num_vars);
    p.c.head(free_vars_) = c_free;
    p.objective_offset = offset;
    std::vector<Eigen::Triplet<double>> trips;
    for (size_t r = 0; r < rows_.size(); ++r)
      for (const auto& [col, v] : rows_[r])
        if (v != 0.0) trips.emplace_back(static_cast<int>(r), col, v);
    p.A.resize(static_cast<Eigen::Index>(rows_.size()), p.num_vars);
    p.A.setFromTriplets(trips.begin(), trips.end());
    p.A.makeCompressed();
    p.b = Eigen::Map<const Eigen::VectorXd>(rhs_.data(), static_cast<Eigen::Index>(rhs_.size()));
  }

 private:
  AssembledProgram& out_;
  std::vector<Row> rows_;
  std::vector<double> rhs_;
  std::vector<Cone> cones_;
  int free_vars_ = 0;
};

}  // namespace

AssembledProgram assemble_primal(const ScenarioSpec& scn) {
  scn.validate();
  const auto& dyn = scn.dynamics;
  const auto& space = dyn.space;
  const int d = scn.degree;
  const int K = scn.phases;
  const int shift = generator_degree_shift(dyn);
  const int d_test = d - shift;
  if (d_test < 1)
    throw std::invalid_argument("relaxation: degree " + std::to_string(d) + " leaves no test functions (drift shift " +
                                std::to_string(shift) + ")");
  if (scn.cost.degree() > d)
    throw std::invalid_argument("relaxation: cost degree " + std::to_string(scn.cost.degree()) +
                                " exceeds relaxation degree " + std::to_string(d));
  if (scn.terminal_cost && scn.terminal_cost->degree() > d)
    throw std::invalid_argument("relaxation: terminal cost degree exceeds relaxation degree");

  AssembledProgram out;
  out.scenario = scn;
  out.test_degree = d_test;
  for (int k = 0; k <= K; ++k) out.breakpoints.push_back(dyn.horizon * k / K);

  std::vector<BlockKind> occ_blocks{BlockKind::time, BlockKind::state};
  if (space.has(BlockKind::control)) occ_blocks.push_back(BlockKind::control);
  const std::vector<BlockKind> state_blocks{BlockKind::state};

  // Measure slots and moment variables.
  int nv = 0;
  auto add_measure = [&](MeasureRef ref, std::vector<BlockKind> blocks, const MeasureSpec* fixed) {
    MeasureLayout m;
    m.ref = ref;
    m.blocks = blocks;
    m.basis = enumerate_basis(space, d, blocks);
    const int slot = static_cast<int>(out.measures.size());
    if (fixed) {
      m.fixed = boundary_moments(*fixed, space, d);
    } else {
      m.first_var = nv;
      for (const auto& e : m.basis) {
        out.index_map[{slot, e}] = nv++;
        out.variable_owner.emplace_back(slot, e);
      }
    }
    out.measures.push_back(std::move(m));
  };
  add_measure({MeasureRef::Role::interface, 0}, state_blocks, &scn.initial);
  for (int k = 1; k <= K; ++k) {
    add_measure({MeasureRef::Role::occupation, k}, occ_blocks, nullptr);
    const bool fixed_end = k == K && !scn.terminal.is_free();
    add_measure({MeasureRef::Role::interface, k}, state_blocks, fixed_end ? &scn.terminal : nullptr);
  }

  Builder B(out);
  B.set_free_vars(nv);
  const int t_idx = space.offset(BlockKind::time);

  // Weak Fokker-Planck rows.
  const auto tests = enumerate_basis(space, d_test, std::vector<BlockKind>{BlockKind::time, BlockKind::state});
  for (int k = 1; k <= K; ++k) {
    const int mu = out.occupation_slot(k);
    const int nu_prev = out.interface_slot(k - 1);
    const int nu_next = out.interface_slot(k);
    for (const auto& e : tests) {
      const Polynomial v = Polynomial::monomial(space, e);
      const int row = B.new_row();
      out.constraint_map[{k, e}] = row;
      const Polynomial at_end = v.fix_variable(t_idx, out.breakpoints[static_cast<size_t>(k)]);
      const Polynomial at_start = v.fix_variable(t_idx, out.breakpoints[static_cast<size_t>(k - 1)]);
      const Polynomial Lv = apply_generator(v, dyn);
      for (const auto& [a, c] : at_end.terms()) B.add_moment(row, nu_next, a, c);
      for (const auto& [a, c] : at_start.terms()) B.add_moment(row, nu_prev, a, -c);
      for (const auto& [a, c] : Lv.terms()) B.add_moment(row, mu, a, -c);
    }
  }

  // Unit mass on free interface measures.
  const ExponentVector zero(space.size());
  for (int k = 1; k <= K; ++k) {
    const int slot = out.interface_slot(k);
    if (out.measures[static_cast<size_t>(slot)].fixed) continue;
    const int row = B.new_row(1.0);
    B.add_moment(row, slot, zero, 1.0);
    out.mass_rows.push_back(row);
  }

  // Moment and localizing matrices.
  const Polynomial one = Polynomial::constant(space, 1.0);
  auto order_for = [&](const Polynomial& g, const std::string& what) {
    const int dg = g.degree();
    if (dg > d)
      throw std::invalid_argument("relaxation: " + what + " has degree " + std::to_string(dg) +
                                  " above relaxation degree " + std::to_string(d));
    return (d - dg) / 2;
  };
  auto state_only = [](const Polynomial& g) {
    return !g.depends_on(BlockKind::time) && !g.depends_on(BlockKind::control);
  };
  const Polynomial t = Polynomial::variable(space, t_idx);
  for (int k = 1; k <= K; ++k) {
    const int mu = out.occupation_slot(k);
    const std::string lab = out.measures[static_cast<size_t>(mu)].ref.label();
    B.localizer(mu, one, d / 2, lab + ":moment");
    const double t0 = out.breakpoints[static_cast<size_t>(k - 1)], t1 = out.breakpoints[static_cast<size_t>(k)];
    const Polynomial window = (t - Polynomial::constant(space, t0)) * (Polynomial::constant(space, t1) - t);
    B.localizer(mu, window, order_for(window, "time window"), lab + ":time");
    int j = 0;
    for (const auto& g : scn.state_support.inequalities)
      B.localizer(mu, g, order_for(g, "state support"), lab + ":state" + std::to_string(++j));
    j = 0;
    for (const auto& g : scn.control_support.inequalities)
      B.localizer(mu, g, order_for(g, "control support"), lab + ":control" + std::to_string(++j));
  }
  for (int k = 0; k <= K; ++k) {
    const int nu = out.interface_slot(k);
    const auto& m = out.measures[static_cast<size_t>(nu)];
    const std::string lab = m.ref.label();
    if (!m.fixed) B.localizer(nu, one, d / 2, lab + ":moment");
    int j = 0;
    for (const auto& g : scn.state_support.inequalities)
      if (state_only(g)) B.localizer(nu, g, order_for(g, "state support"), lab + ":state" + std::to_string(++j));
    if (k == K) {
      j = 0;
      for (const auto& g : scn.terminal_support.inequalities)
        B.localizer(nu, g, order_for(g, "terminal support"), lab + ":terminal" + std::to_string(++j));
    }
  }

  // Objective.
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nv);
  double offset = 0.0;
  for (int k = 1; k <= K; ++k)
    for (const auto& [a, v] : scn.cost.terms()) c(out.index_map.at({out.occupation_slot(k), a})) += v;
  if (scn.terminal_cost) {
    const int nu = out.interface_slot(K);
    const auto& m = out.measures[static_cast<size_t>(nu)];
    if (m.fixed)
      offset += m.fixed->pair(*scn.terminal_cost);
    else
      for (const auto& [a, v] : scn.terminal_cost->terms()) c(out.index_map.at({nu, a})) += v;
  }
  B.finish(c, offset);
  out.conic.validate();
  return out;
}

}  // namespace mfp
