#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <vector>

#include "momentfp/polycore.hpp"

namespace mfp {

/// Truncated moment sequence of a measure living on some blocks of `space`,
/// aligned with enumerate_basis(space, max_degree, blocks).
class MomentVector {
 public:
  MomentVector() = default;
  MomentVector(VariableSpace space, std::vector<BlockKind> blocks, int max_degree);

  const VariableSpace& space() const { return space_; }
  const std::vector<BlockKind>& blocks() const { return blocks_; }
  int max_degree() const { return max_degree_; }
  const std::vector<ExponentVector>& basis() const { return basis_; }
  int size() const { return static_cast<int>(basis_.size()); }

  Eigen::VectorXd& values() { return values_; }
  const Eigen::VectorXd& values() const { return values_; }
  double mass() const { return values_(0); }

  /// Position of `e` in the basis, or -1 when outside the truncation/blocks.
  int index_of(const ExponentVector& e) const;
  double at(const ExponentVector& e) const;
  double& at(const ExponentVector& e);

  /// Integral of p against the measure; p must live in the basis.
  double pair(const Polynomial& p) const;

 private:
  VariableSpace space_;
  std::vector<BlockKind> blocks_;
  int max_degree_ = 0;
  std::vector<ExponentVector> basis_;
  std::map<ExponentVector, int> index_;
  Eigen::VectorXd values_;
};

struct MeasureSpec {
  enum class Kind { dirac, gaussian, uniform_box, empirical, free };

  Kind kind = Kind::free;
  int dimension = 0;
  Eigen::VectorXd point;       // dirac
  Eigen::VectorXd mean;        // gaussian
  Eigen::MatrixXd covariance;  // gaussian
  Eigen::VectorXd lower;       // uniform_box
  Eigen::VectorXd upper;       // uniform_box
  std::vector<Eigen::VectorXd> samples;  // empirical

  static MeasureSpec make_dirac(Eigen::VectorXd point);
  static MeasureSpec make_gaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance);
  static MeasureSpec make_uniform_box(Eigen::VectorXd lower, Eigen::VectorXd upper);
  static MeasureSpec make_empirical(std::vector<Eigen::VectorXd> samples);
  static MeasureSpec make_free(int dimension);

  bool is_free() const { return kind == Kind::free; }
  void validate() const;
};

const char* measure_kind_name(MeasureSpec::Kind kind);

/// Inequalities g_j >= 0 describing a (compact, by user contract) set.
struct SupportSet {
  std::vector<Polynomial> inequalities;

  bool empty() const { return inequalities.empty(); }
  bool contains(std::span<const double> point, double tol = 0.0) const;
};

/// Exact moments of a non-free measure over the state block of `space`.
MomentVector boundary_moments(const MeasureSpec& spec, const VariableSpace& space, int max_degree);
/// Same, over a plain state-only space x1..xn.
MomentVector boundary_moments(const MeasureSpec& spec, int max_degree);

/// M[a,b] = y[a+b] over the degree-<=d basis on y's blocks.
Eigen::MatrixXd moment_matrix(const MomentVector& y, int d);

/// L[a,b] = sum_g g_c y[a+b+c].
Eigen::MatrixXd localizing_matrix(const MomentVector& y, const Polynomial& g, int d);

}  // namespace mfp
