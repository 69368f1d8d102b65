#include "momentfp/generator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mfp {

void DynamicsSpec::validate() const {
  const int n = state_dim();
  if (n < 1) throw std::invalid_argument("dynamics: state dimension must be positive");
  if (!space.has(BlockKind::time)) throw std::invalid_argument("dynamics: variable space needs a time block");
  if (static_cast<int>(drift.size()) != n)
    throw std::invalid_argument("dynamics: expected " + std::to_string(n) + " drift polynomials, got " +
                                std::to_string(drift.size()));
  for (size_t i = 0; i < drift.size(); ++i) {
    if (!(drift[i].space() == space)) throw std::invalid_argument("dynamics: drift space mismatch");
    if (drift[i].depends_on(BlockKind::time))
      throw std::invalid_argument("dynamics: drift f" + std::to_string(i + 1) + " depends on time");
  }
  if (diffusion.rows() != n || diffusion.cols() != n)
    throw std::invalid_argument("dynamics: diffusion must be " + std::to_string(n) + "x" + std::to_string(n));
  if (!diffusion.allFinite()) throw std::invalid_argument("dynamics: diffusion has non-finite entries");
  if ((diffusion - diffusion.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("dynamics: diffusion matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(diffusion, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("dynamics: diffusion matrix is not positive semidefinite");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("dynamics: horizon must be positive");
}

Polynomial apply_generator(const Polynomial& v, const DynamicsSpec& dyn) {
  if (!(v.space() == dyn.space)) throw std::invalid_argument("apply_generator: space mismatch");
  if (v.depends_on(BlockKind::control))
    throw std::invalid_argument("apply_generator: test function depends on control variables");
  Polynomial out = v.derivative(dyn.space.offset(BlockKind::time));
  const auto xs = dyn.space.indices(BlockKind::state);
  for (size_t i = 0; i < xs.size(); ++i) {
    const Polynomial dv = v.derivative(xs[i]);
    if (!dv.is_zero()) out += dyn.drift[i] * dv;
  }
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = 0; j < xs.size(); ++j) {
      const double d = dyn.diffusion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (d != 0.0) out += v.derivative(xs[i], xs[j]) * d;
    }
  return out;
}

int generator_degree_shift(const DynamicsSpec& dyn) {
  int deg = 0;
  for (const auto& f : dyn.drift) deg = std::max(deg, f.degree());
  return std::max(deg - 1, 0);
}

}  // namespace mfp
