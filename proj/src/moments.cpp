#include "momentfp/moments.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mfp {

MomentVector::MomentVector(VariableSpace space, std::vector<BlockKind> blocks, int max_degree)
    : space_(std::move(space)), blocks_(std::move(blocks)), max_degree_(max_degree) {
  basis_ = enumerate_basis(space_, max_degree_, blocks_);
  for (size_t i = 0; i < basis_.size(); ++i) index_.emplace(basis_[i], static_cast<int>(i));
  values_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis_.size()));
}

int MomentVector::index_of(const ExponentVector& e) const {
  auto it = index_.find(e);
  return it == index_.end() ? -1 : it->second;
}

double MomentVector::at(const ExponentVector& e) const {
  const int i = index_of(e);
  if (i < 0) throw std::out_of_range("moment index outside truncation");
  return values_(i);
}

double& MomentVector::at(const ExponentVector& e) {
  const int i = index_of(e);
  if (i < 0) throw std::out_of_range("moment index outside truncation");
  return values_(i);
}

double MomentVector::pair(const Polynomial& p) const {
  double s = 0.0;
  for (const auto& [e, c] : p.terms()) s += c * at(e);
  return s;
}

// ---------------------------------------------------------------------------

MeasureSpec MeasureSpec::make_dirac(Eigen::VectorXd point) {
  MeasureSpec m;
  m.kind = Kind::dirac;
  m.dimension = static_cast<int>(point.size());
  m.point = std::move(point);
  return m;
}

MeasureSpec MeasureSpec::make_gaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance) {
  MeasureSpec m;
  m.kind = Kind::gaussian;
  m.dimension = static_cast<int>(mean.size());
  m.mean = std::move(mean);
  m.covariance = std::move(covariance);
  return m;
}

MeasureSpec MeasureSpec::make_uniform_box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  MeasureSpec m;
  m.kind = Kind::uniform_box;
  m.dimension = static_cast<int>(lower.size());
  m.lower = std::move(lower);
  m.upper = std::move(upper);
  return m;
}

MeasureSpec MeasureSpec::make_empirical(std::vector<Eigen::VectorXd> samples) {
  MeasureSpec m;
  m.kind = Kind::empirical;
  m.dimension = samples.empty() ? 0 : static_cast<int>(samples.front().size());
  m.samples = std::move(samples);
  return m;
}

MeasureSpec MeasureSpec::make_free(int dimension) {
  MeasureSpec m;
  m.kind = Kind::free;
  m.dimension = dimension;
  return m;
}

const char* measure_kind_name(MeasureSpec::Kind kind) {
  switch (kind) {
    case MeasureSpec::Kind::dirac:
      return "dirac";
    case MeasureSpec::Kind::gaussian:
      return "gaussian";
    case MeasureSpec::Kind::uniform_box:
      return "uniform_box";
    case MeasureSpec::Kind::empirical:
      return "empirical";
    case MeasureSpec::Kind::free:
      return "free";
  }
  return "?";
}

void MeasureSpec::validate() const {
  if (dimension < 1) throw std::invalid_argument("measure dimension must be positive");
  switch (kind) {
    case Kind::dirac:
      if (point.size() != dimension || !point.allFinite())
        throw std::invalid_argument("dirac point must be finite with length " + std::to_string(dimension));
      break;
    case Kind::gaussian: {
      if (mean.size() != dimension || covariance.rows() != dimension || covariance.cols() != dimension)
        throw std::invalid_argument("gaussian mean/covariance shape mismatch");
      if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("gaussian covariance is not symmetric");
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance, Eigen::EigenvaluesOnly);
      if (eig.eigenvalues().minCoeff() < -1e-12) throw std::invalid_argument("gaussian covariance is not PSD");
      break;
    }
    case Kind::uniform_box:
      if (lower.size() != dimension || upper.size() != dimension)
        throw std::invalid_argument("uniform box bounds shape mismatch");
      for (int i = 0; i < dimension; ++i)
        if (!(lower(i) < upper(i))) throw std::invalid_argument("uniform box requires lower < upper componentwise");
      break;
    case Kind::empirical:
      if (samples.empty()) throw std::invalid_argument("empirical measure needs at least one sample");
      for (const auto& s : samples)
        if (s.size() != dimension || !s.allFinite()) throw std::invalid_argument("empirical sample shape mismatch");
      break;
    case Kind::free:
      break;
  }
}

bool SupportSet::contains(std::span<const double> point, double tol) const {
  for (const auto& g : inequalities)
    if (g.evaluate(point) < -tol) return false;
  return true;
}

// ---------------------------------------------------------------------------

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

class GaussianMoments {
 public:
  GaussianMoments(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) : mean_(mean), cov_(cov) {}

  // Stein recursion: E[x_i x^b] = m_i E[x^b] + sum_j C_ij b_j E[x^(b - e_j)].
  double operator()(const std::vector<int>& a) {
    int i = -1;
    for (size_t k = 0; k < a.size(); ++k)
      if (a[k] > 0) {
        i = static_cast<int>(k);
        break;
      }
    if (i < 0) return 1.0;
    if (auto it = memo_.find(a); it != memo_.end()) return it->second;
    std::vector<int> b = a;
    b[static_cast<size_t>(i)] -= 1;
    double v = mean_(i) * (*this)(b);
    for (size_t j = 0; j < b.size(); ++j) {
      if (b[j] == 0) continue;
      const double c = cov_(i, static_cast<Eigen::Index>(j));
      if (c == 0.0) continue;
      std::vector<int> bj = b;
      bj[j] -= 1;
      v += c * b[j] * (*this)(bj);
    }
    memo_.emplace(a, v);
    return v;
  }

 private:
  const Eigen::VectorXd& mean_;
  const Eigen::MatrixXd& cov_;
  std::map<std::vector<int>, double> memo_;
};

std::vector<int> local_exponents(const ExponentVector& e, const std::vector<int>& state_idx) {
  std::vector<int> a(state_idx.size());
  for (size_t k = 0; k < state_idx.size(); ++k) a[k] = e[state_idx[k]];
  return a;
}

void fill_dirac(MomentVector& y, const Eigen::VectorXd& p, const std::vector<int>& state_idx) {
  for (int r = 0; r < y.size(); ++r) {
    const auto a = local_exponents(y.basis()[static_cast<size_t>(r)], state_idx);
    double v = 1.0;
    for (size_t k = 0; k < a.size(); ++k) v *= ipow(p(static_cast<Eigen::Index>(k)), a[k]);
    y.values()(r) = v;
  }
}

}  // namespace

MomentVector boundary_moments(const MeasureSpec& spec, const VariableSpace& space, int max_degree) {
  if (spec.is_free()) throw std::invalid_argument("boundary_moments: a free measure has no computable moments");
  spec.validate();
  if (space.dim(BlockKind::state) != spec.dimension)
    throw std::invalid_argument("boundary_moments: measure dimension does not match state block");
  MomentVector y(space, {BlockKind::state}, max_degree);
  const auto state_idx = space.indices(BlockKind::state);
  switch (spec.kind) {
    case MeasureSpec::Kind::dirac:
      fill_dirac(y, spec.point, state_idx);
      break;
    case MeasureSpec::Kind::gaussian: {
      GaussianMoments g(spec.mean, spec.covariance);
      for (int r = 0; r < y.size(); ++r) y.values()(r) = g(local_exponents(y.basis()[static_cast<size_t>(r)], state_idx));
      break;
    }
    case MeasureSpec::Kind::uniform_box:
      for (int r = 0; r < y.size(); ++r) {
        const auto a = local_exponents(y.basis()[static_cast<size_t>(r)], state_idx);
        double v = 1.0;
        for (size_t k = 0; k < a.size(); ++k) {
          const double lo = spec.lower(static_cast<Eigen::Index>(k));
          const double hi = spec.upper(static_cast<Eigen::Index>(k));
          v *= (ipow(hi, a[k] + 1) - ipow(lo, a[k] + 1)) / ((a[k] + 1) * (hi - lo));
        }
        y.values()(r) = v;
      }
      break;
    case MeasureSpec::Kind::empirical: {
      MomentVector one(space, {BlockKind::state}, max_degree);
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(y.size());
      for (const auto& s : spec.samples) {
        fill_dirac(one, s, state_idx);
        sum += one.values();
      }
      y.values() = sum / static_cast<double>(spec.samples.size());
      break;
    }
    case MeasureSpec::Kind::free:
      break;
  }
  return y;
}

MomentVector boundary_moments(const MeasureSpec& spec, int max_degree) {
  return boundary_moments(spec, VariableSpace::make(spec.dimension, 0, false), max_degree);
}

Eigen::MatrixXd moment_matrix(const MomentVector& y, int d) {
  return localizing_matrix(y, Polynomial::constant(y.space(), 1.0), d);
}

Eigen::MatrixXd localizing_matrix(const MomentVector& y, const Polynomial& g, int d) {
  if (d < 0) throw std::invalid_argument("localizing order must be non-negative");
  if (!(g.space() == y.space())) throw std::invalid_argument("localizing polynomial space mismatch");
  if (2 * d + g.degree() > y.max_degree())
    throw std::invalid_argument("localizing matrix of order " + std::to_string(d) + " with a degree-" +
                                std::to_string(g.degree()) + " weight needs moments of degree " +
                                std::to_string(2 * d + g.degree()) + ", have " + std::to_string(y.max_degree()));
  const auto basis = enumerate_basis(y.space(), d, y.blocks());
  const auto s = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd L(s, s);
  for (Eigen::Index i = 0; i < s; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const ExponentVector ab = basis[static_cast<size_t>(i)] + basis[static_cast<size_t>(j)];
      double v = 0.0;
      for (const auto& [e, c] : g.terms()) {
        const int k = y.index_of(ab + e);
        if (k < 0) throw std::invalid_argument("localizing polynomial uses variables outside the measure's blocks");
        v += c * y.values()(k);
      }
      L(i, j) = v;
      L(j, i) = v;
    }
  return L;
}

}  // namespace mfp
