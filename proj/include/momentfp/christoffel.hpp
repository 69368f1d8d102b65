#pragma once

// Christoffel polynomials of sample sets: Lambda(z) = phi(z)' (M + eps I)^-1 phi(z)
// with M the empirical moment matrix in normalized coordinates.

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "momentfp/polycore.hpp"

namespace mfp {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Samples in normalized coordinates z = (raw - offset) / scale.
struct SampleSet {
  int dimension = 0;
  std::vector<Eigen::VectorXd> samples;
  std::string source;
  std::vector<std::string> columns;
  Eigen::VectorXd offset, scale;
  std::vector<std::string> warnings;

  Eigen::VectorXd normalize(const Eigen::VectorXd& raw) const;
  Eigen::VectorXd denormalize(const Eigen::VectorXd& z) const;
};

struct NormalizationBox {
  Eigen::VectorXd lower, upper;
};

/// Reads the named columns of a CSV file with a header row. The box defaults
/// to the sample min/max per column.
SampleSet load_samples(const std::string& path, const std::vector<std::string>& columns,
                       const std::optional<NormalizationBox>& box = std::nullopt, char delimiter = ',');

/// Builds a SampleSet from in-memory normalized points (identity transform).
SampleSet make_sample_set(std::vector<Eigen::VectorXd> points);

struct EmpiricalMomentMatrix {
  VariableSpace space;  // x1..x_dim, the normalized sample coordinates
  int degree = 0;
  std::vector<ExponentVector> basis;
  Eigen::MatrixXd M;    // (1/N) sum phi phi', without regularization
  double epsilon = 0.0;

  int side() const { return static_cast<int>(basis.size()); }
  Eigen::MatrixXd regularized() const;
};

/// 1e-8 * trace(M) / side.
double default_epsilon(const Eigen::MatrixXd& M);

/// epsilon < 0 selects default_epsilon.
EmpiricalMomentMatrix empirical_moment_matrix(const SampleSet& s, int degree, double epsilon = -1.0,
                                              int side_cap = 500);

/// Explicit polynomial of degree 2 * degree in the normalized coordinates.
Polynomial christoffel_poly(const EmpiricalMomentMatrix& m);

/// Direct evaluation of phi(z)' (M + eps I)^-1 phi(z).
double christoffel_value(const EmpiricalMomentMatrix& m, std::span<const double> z);

/// Lambda expressed in raw coordinates and lifted into `target`: sample
/// coordinate i maps to target variable target_index[i].
Polynomial lift_christoffel(const Polynomial& lambda, const SampleSet& s, const VariableSpace& target,
                            std::span<const int> target_index);

}  // namespace mfp
