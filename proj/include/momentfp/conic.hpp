#pragma once

// Standard-form conic programs:
//
//   minimize    c'x + offset
//   subject to  A x = b,  x in K = free x nonneg x PSD x ...
//
// PSD blocks are stored as scaled lower-triangle vectors (column-major,
// off-diagonals multiplied by sqrt(2)) so that vec(X)'vec(Y) = <X, Y>.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace mfp {

struct Cone {
  enum class Kind { free, nonneg, psd };
  Kind kind;
  int size;  // entry count, or matrix side for psd

  int dim() const { return kind == Kind::psd ? size * (size + 1) / 2 : size; }
};

const char* cone_kind_name(Cone::Kind kind);

using SparseMatrixR = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct ConicProgram {
  int num_vars = 0;
  std::vector<Cone> cones;
  SparseMatrixR A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  double objective_offset = 0.0;

  int num_rows() const { return static_cast<int>(A.rows()); }
  /// Throws std::invalid_argument on inconsistent shapes or non-finite data.
  void validate() const;
};

enum class SolveStatus { optimal, primal_infeasible, dual_infeasible, numerical_trouble, iteration_limit };

const char* status_name(SolveStatus s);

struct Residuals {
  double primal = 0.0;  // ||Ax - b||_inf / (1 + ||b||_inf)
  double dual = 0.0;    // ||A'y + s - c||_inf / (1 + ||c||_inf)
  double gap = 0.0;     // |pobj - dobj| / max(1, |pobj|)
};

struct ConicSolution {
  SolveStatus status = SolveStatus::numerical_trouble;
  Eigen::VectorXd primal;
  Eigen::VectorXd equality_multipliers;
  Eigen::VectorXd cone_duals;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  Residuals residuals;
  int iterations = 0;
};

struct SolverSettings {
  double tol = 1e-8;
  int max_iters = 200;
  int verbosity = 0;
};

/// Pluggable solver backend.
class ConicBackend {
 public:
  virtual ~ConicBackend() = default;
  virtual std::string name() const = 0;
  virtual ConicSolution solve(const ConicProgram& p, const SolverSettings& settings) const = 0;
};

/// Dense homogeneous self-dual primal-dual interior-point method with
/// Nesterov-Todd scaling and a Mehrotra corrector. Free variables are
/// eliminated up front by a rank-revealing QR, so it suits small and medium
/// programs.
class InteriorPointBackend final : public ConicBackend {
 public:
  std::string name() const override { return "dense-ipm"; }
  ConicSolution solve(const ConicProgram& p, const SolverSettings& settings) const override;
};

ConicSolution solve(const ConicProgram& p, const SolverSettings& settings = {});

/// Independent recomputation of feasibility measures of a returned point.
struct ResidualReport {
  double equality_residual = 0.0;  // ||Ax - b||_inf
  double min_primal_eig = 0.0;     // over nonneg entries and PSD blocks
  double min_dual_eig = 0.0;       // same for cone_duals
  double complementarity = 0.0;    // x's (cone part)
  double dual_residual = 0.0;      // ||A'y + s - c||_inf
};

ResidualReport self_check(const ConicProgram& p, const ConicSolution& s);

Eigen::VectorXd svec(const Eigen::MatrixXd& m);
Eigen::MatrixXd smat(const Eigen::Ref<const Eigen::VectorXd>& v, int side);
int psd_side_from_dim(int dim);

/// Line-oriented text export for external-solver debugging.
void write_program_text(const ConicProgram& p, std::ostream& out);

}  // namespace mfp
