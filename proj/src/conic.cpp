#include "momentfp/conic.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace mfp {

const char* cone_kind_name(Cone::Kind kind) {
  switch (kind) {
    case Cone::Kind::free:
      return "free";
    case Cone::Kind::nonneg:
      return "nonneg";
    case Cone::Kind::psd:
      return "psd";
  }
  return "?";
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::primal_infeasible:
      return "primal_infeasible";
    case SolveStatus::dual_infeasible:
      return "dual_infeasible";
    case SolveStatus::numerical_trouble:
      return "numerical_trouble";
    case SolveStatus::iteration_limit:
      return "iteration_limit";
  }
  return "?";
}

void ConicProgram::validate() const {
  int total = 0;
  for (const auto& k : cones) {
    if (k.size < 0) throw std::invalid_argument("conic program: negative cone size");
    total += k.dim();
  }
  if (total != num_vars)
    throw std::invalid_argument("conic program: cone sizes sum to " + std::to_string(total) + ", expected " +
                                std::to_string(num_vars));
  if (A.cols() != num_vars) throw std::invalid_argument("conic program: A column count mismatch");
  if (b.size() != A.rows()) throw std::invalid_argument("conic program: b length mismatch");
  if (c.size() != num_vars) throw std::invalid_argument("conic program: c length mismatch");
  if (!b.allFinite() || !c.allFinite() || !std::isfinite(objective_offset))
    throw std::invalid_argument("conic program: non-finite data in b or c");
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrixR::InnerIterator it(A, k); it; ++it)
      if (!std::isfinite(it.value())) throw std::invalid_argument("conic program: non-finite entry in A");
}

Eigen::VectorXd svec(const Eigen::MatrixXd& m) {
  const auto s = m.rows();
  Eigen::VectorXd v(s * (s + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < s; ++j)
    for (Eigen::Index i = j; i < s; ++i) v(k++) = (i == j) ? m(i, j) : M_SQRT2 * m(i, j);
  return v;
}

Eigen::MatrixXd smat(const Eigen::Ref<const Eigen::VectorXd>& v, int side) {
  if (v.size() != side * (side + 1) / 2) throw std::invalid_argument("smat: length does not match side");
  Eigen::MatrixXd m(side, side);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < side; ++j)
    for (Eigen::Index i = j; i < side; ++i) {
      const double x = (i == j) ? v(k) : v(k) * M_SQRT1_2;
      m(i, j) = x;
      m(j, i) = x;
      ++k;
    }
  return m;
}

int psd_side_from_dim(int dim) {
  int s = static_cast<int>(std::lround((std::sqrt(8.0 * dim + 1.0) - 1.0) / 2.0));
  if (s * (s + 1) / 2 != dim) throw std::invalid_argument("not a triangular number");
  return s;
}

namespace {

double min_cone_eig(const ConicProgram& p, const Eigen::VectorXd& v) {
  double best = std::numeric_limits<double>::infinity();
  int off = 0;
  for (const auto& k : p.cones) {
    if (k.kind == Cone::Kind::nonneg && k.size > 0) best = std::min(best, v.segment(off, k.size).minCoeff());
    if (k.kind == Cone::Kind::psd && k.size > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(smat(v.segment(off, k.dim()), k.size),
                                                         Eigen::EigenvaluesOnly);
      best = std::min(best, eig.eigenvalues()(0));
    }
    off += k.dim();
  }
  return std::isinf(best) ? 0.0 : best;
}

}  // namespace

ResidualReport self_check(const ConicProgram& p, const ConicSolution& s) {
  if (s.primal.size() != p.num_vars) throw std::invalid_argument("self_check: primal length mismatch");
  ResidualReport r;
  const Eigen::VectorXd ax = p.A * s.primal;
  r.equality_residual = p.num_rows() ? (ax - p.b).cwiseAbs().maxCoeff() : 0.0;
  r.min_primal_eig = min_cone_eig(p, s.primal);
  if (s.cone_duals.size() == p.num_vars) {
    r.min_dual_eig = min_cone_eig(p, s.cone_duals);
    int off = 0;
    for (const auto& k : p.cones) {
      if (k.kind != Cone::Kind::free)
        r.complementarity += s.primal.segment(off, k.dim()).dot(s.cone_duals.segment(off, k.dim()));
      off += k.dim();
    }
    if (s.equality_multipliers.size() == p.num_rows()) {
      const Eigen::VectorXd rd = p.A.transpose() * s.equality_multipliers + s.cone_duals - p.c;
      r.dual_residual = p.num_vars ? rd.cwiseAbs().maxCoeff() : 0.0;
    }
  }
  return r;
}

ConicSolution solve(const ConicProgram& p, const SolverSettings& settings) {
  return InteriorPointBackend{}.solve(p, settings);
}

void write_program_text(const ConicProgram& p, std::ostream& out) {
  char buf[96];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "momentfp-conic 1\n";
  out << "vars " << p.num_vars << " rows " << p.num_rows() << " nnz " << p.A.nonZeros() << " cones "
      << p.cones.size() << "\n";
  out << "offset " << num(p.objective_offset) << "\n";
  out << "A\n";
  for (int k = 0; k < p.A.outerSize(); ++k)
    for (SparseMatrixR::InnerIterator it(p.A, k); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << num(it.value()) << "\n";
  out << "b\n";
  for (Eigen::Index i = 0; i < p.b.size(); ++i) out << num(p.b(i)) << "\n";
  out << "c\n";
  for (Eigen::Index i = 0; i < p.c.size(); ++i) out << num(p.c(i)) << "\n";
  out << "cones\n";
  for (const auto& k : p.cones) out << cone_kind_name(k.kind) << ' ' << k.size << "\n";
}

}  // namespace mfp
