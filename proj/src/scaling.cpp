#include <cmath>
#include <stdexcept>
#include <string>

#include "momentfp/relaxation.hpp"

namespace mfp {

AffineTransform AffineTransform::identity(const DynamicsSpec& dyn) {
  AffineTransform t;
  t.state_offset = Eigen::VectorXd::Zero(dyn.state_dim());
  t.state_scale = Eigen::VectorXd::Ones(dyn.state_dim());
  t.control_offset = Eigen::VectorXd::Zero(dyn.control_dim());
  t.control_scale = Eigen::VectorXd::Ones(dyn.control_dim());
  return t;
}

Eigen::VectorXd AffineTransform::state_to_physical(const Eigen::VectorXd& x) const {
  return state_offset + state_scale.cwiseProduct(x);
}

Eigen::VectorXd AffineTransform::state_to_scaled(const Eigen::VectorXd& x) const {
  return (x - state_offset).cwiseQuotient(state_scale);
}

Eigen::MatrixXd AffineTransform::covariance_to_physical(const Eigen::MatrixXd& c) const {
  return state_scale.asDiagonal() * c * state_scale.asDiagonal();
}

void AffineTransform::offsets_and_scales(const VariableSpace& space, bool inverse, std::vector<double>& off,
                                         std::vector<double>& sc) const {
  off.assign(static_cast<size_t>(space.size()), 0.0);
  sc.assign(static_cast<size_t>(space.size()), 1.0);
  auto put = [&](int idx, double o, double s) {
    // forward: z = o + s z'; inverse: z' = -o/s + z/s
    off[static_cast<size_t>(idx)] = inverse ? -o / s : o;
    sc[static_cast<size_t>(idx)] = inverse ? 1.0 / s : s;
  };
  if (space.has(BlockKind::time)) put(space.offset(BlockKind::time), 0.0, horizon);
  const auto xs = space.indices(BlockKind::state);
  for (size_t i = 0; i < xs.size(); ++i)
    put(xs[i], state_offset(static_cast<Eigen::Index>(i)), state_scale(static_cast<Eigen::Index>(i)));
  const auto us = space.indices(BlockKind::control);
  for (size_t i = 0; i < us.size(); ++i)
    put(us[i], control_offset(static_cast<Eigen::Index>(i)), control_scale(static_cast<Eigen::Index>(i)));
}

Polynomial AffineTransform::to_scaled(const Polynomial& p) const {
  std::vector<double> off, sc;
  offsets_and_scales(p.space(), false, off, sc);
  return p.affine_substitute(off, sc);
}

Polynomial AffineTransform::to_physical(const Polynomial& p) const {
  std::vector<double> off, sc;
  offsets_and_scales(p.space(), true, off, sc);
  return p.affine_substitute(off, sc);
}

namespace {

void box_to_affine(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int dim, const char* what,
                   Eigen::VectorXd& offset, Eigen::VectorXd& scale) {
  if (lo.size() != dim || hi.size() != dim)
    throw std::invalid_argument(std::string("scaling box: ") + what + " bounds must have length " +
                                std::to_string(dim));
  offset.resize(dim);
  scale.resize(dim);
  for (int i = 0; i < dim; ++i) {
    if (!std::isfinite(lo(i)) || !std::isfinite(hi(i)))
      throw std::invalid_argument(std::string("scaling box: unbounded ") + what + " coordinate " +
                                  std::to_string(i + 1));
    if (!(lo(i) < hi(i)))
      throw std::invalid_argument(std::string("scaling box: empty ") + what + " interval at coordinate " +
                                  std::to_string(i + 1));
    offset(i) = 0.5 * (lo(i) + hi(i));
    scale(i) = 0.5 * (hi(i) - lo(i));
  }
}

MeasureSpec map_measure(const MeasureSpec& m, const AffineTransform& tr) {
  MeasureSpec out = m;
  const Eigen::VectorXd inv = tr.state_scale.cwiseInverse();
  switch (m.kind) {
    case MeasureSpec::Kind::dirac:
      out.point = tr.state_to_scaled(m.point);
      break;
    case MeasureSpec::Kind::gaussian:
      out.mean = tr.state_to_scaled(m.mean);
      out.covariance = inv.asDiagonal() * m.covariance * inv.asDiagonal();
      break;
    case MeasureSpec::Kind::uniform_box:
      out.lower = tr.state_to_scaled(m.lower);
      out.upper = tr.state_to_scaled(m.upper);
      break;
    case MeasureSpec::Kind::empirical:
      for (auto& s : out.samples) s = tr.state_to_scaled(s);
      break;
    case MeasureSpec::Kind::free:
      break;
  }
  return out;
}

SupportSet map_support(const SupportSet& s, const AffineTransform& tr) {
  SupportSet out;
  for (const auto& g : s.inequalities) out.inequalities.push_back(tr.to_scaled(g));
  return out;
}

}  // namespace

std::pair<ScenarioSpec, AffineTransform> scale_scenario(const ScenarioSpec& scn) {
  scn.validate();
  const auto& dyn = scn.dynamics;
  AffineTransform tr = AffineTransform::identity(dyn);
  tr.horizon = dyn.horizon;
  if (scn.box) {
    box_to_affine(scn.box->state_lower, scn.box->state_upper, dyn.state_dim(), "state", tr.state_offset,
                  tr.state_scale);
    box_to_affine(scn.box->control_lower, scn.box->control_upper, dyn.control_dim(), "control", tr.control_offset,
                  tr.control_scale);
  }

  ScenarioSpec out = scn;
  const double T = dyn.horizon;
  out.dynamics.horizon = 1.0;
  for (size_t i = 0; i < dyn.drift.size(); ++i)
    out.dynamics.drift[i] = tr.to_scaled(dyn.drift[i]) * (T / tr.state_scale(static_cast<Eigen::Index>(i)));
  const Eigen::VectorXd inv = tr.state_scale.cwiseInverse();
  out.dynamics.diffusion = T * (inv.asDiagonal() * dyn.diffusion * inv.asDiagonal());
  out.cost = tr.to_scaled(scn.cost) * T;
  if (scn.terminal_cost) out.terminal_cost = tr.to_scaled(*scn.terminal_cost);
  out.initial = map_measure(scn.initial, tr);
  out.terminal = map_measure(scn.terminal, tr);
  out.state_support = map_support(scn.state_support, tr);
  out.control_support = map_support(scn.control_support, tr);
  out.terminal_support = map_support(scn.terminal_support, tr);
  if (scn.box) {
    ScalingBox unit;
    unit.state_lower = -Eigen::VectorXd::Ones(dyn.state_dim());
    unit.state_upper = Eigen::VectorXd::Ones(dyn.state_dim());
    unit.control_lower = -Eigen::VectorXd::Ones(dyn.control_dim());
    unit.control_upper = Eigen::VectorXd::Ones(dyn.control_dim());
    out.box = unit;
  }
  return {out, tr};
}

}  // namespace mfp
