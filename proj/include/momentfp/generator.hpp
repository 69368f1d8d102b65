#pragma once

#include <Eigen/Dense>
#include <vector>

#include "momentfp/polycore.hpp"

namespace mfp {

/// Stochastic polynomial dynamics dx = f(x,u) dt + sigma dB with constant
/// diffusion. `diffusion` stores D = 1/2 sigma sigma^T directly.
struct DynamicsSpec {
  VariableSpace space;
  std::vector<Polynomial> drift;
  Eigen::MatrixXd diffusion;
  double horizon = 1.0;

  int state_dim() const { return space.dim(BlockKind::state); }
  int control_dim() const { return space.dim(BlockKind::control); }

  /// Throws std::invalid_argument on shape, symmetry, PSD or time-dependence
  /// violations.
  void validate() const;
};

/// LV = dV/dt + sum_i f_i dV/dx_i + sum_ij D_ij d2V/dx_i dx_j.
Polynomial apply_generator(const Polynomial& v, const DynamicsSpec& dyn);

/// max(deg f - 1, 0): how much the generator raises the (x,u)-degree.
int generator_degree_shift(const DynamicsSpec& dyn);

}  // namespace mfp
