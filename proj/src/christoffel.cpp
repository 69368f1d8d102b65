#include "momentfp/christoffel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mfp {

Eigen::VectorXd SampleSet::normalize(const Eigen::VectorXd& raw) const {
  return (raw - offset).cwiseQuotient(scale);
}

Eigen::VectorXd SampleSet::denormalize(const Eigen::VectorXd& z) const { return offset + scale.cwiseProduct(z); }

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, delim)) out.push_back(cell);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

SampleSet load_samples(const std::string& path, const std::vector<std::string>& columns,
                       const std::optional<NormalizationBox>& box, char delimiter) {
  if (columns.empty()) throw DataError(path + ": no columns selected");
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw DataError(path + ": empty file (header row required)");
  const auto header = split(line, delimiter);
  std::vector<size_t> pick;
  for (const auto& c : columns) {
    size_t j = 0;
    while (j < header.size() && trim(header[j]) != c) ++j;
    if (j == header.size()) throw DataError(path + ": missing column '" + c + "'");
    pick.push_back(j);
  }

  SampleSet s;
  s.dimension = static_cast<int>(columns.size());
  s.source = path;
  s.columns = columns;
  std::vector<Eigen::VectorXd> raw;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line, delimiter);
    Eigen::VectorXd v(s.dimension);
    for (int k = 0; k < s.dimension; ++k) {
      const size_t j = pick[static_cast<size_t>(k)];
      const std::string cell = j < cells.size() ? trim(cells[j]) : "";
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(x))
        throw DataError(path + ": row " + std::to_string(row) + ", column '" + columns[static_cast<size_t>(k)] +
                        "': not a finite number: '" + cell + "'");
      v(k) = x;
    }
    raw.push_back(v);
  }
  if (raw.empty()) throw DataError(path + ": no data rows");

  Eigen::VectorXd lo, hi;
  if (box) {
    lo = box->lower;
    hi = box->upper;
    if (lo.size() != s.dimension || hi.size() != s.dimension)
      throw DataError(path + ": normalization box has wrong dimension");
  } else {
    lo = raw.front();
    hi = raw.front();
    for (const auto& v : raw) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  }
  s.offset = 0.5 * (lo + hi);
  s.scale = 0.5 * (hi - lo);
  for (int k = 0; k < s.dimension; ++k)
    if (!(s.scale(k) > 0.0)) {
      if (box) throw DataError(path + ": empty normalization interval for column '" + columns[static_cast<size_t>(k)] + "'");
      s.scale(k) = 1.0;  // constant column
    }
  for (const auto& v : raw) {
    s.samples.push_back(s.normalize(v));
    if (s.samples.back().cwiseAbs().maxCoeff() > 1.5)
      s.warnings.push_back("row sample outside [-1.5, 1.5] after normalization");
  }
  return s;
}

SampleSet make_sample_set(std::vector<Eigen::VectorXd> points) {
  if (points.empty()) throw DataError("sample set is empty");
  SampleSet s;
  s.dimension = static_cast<int>(points.front().size());
  for (const auto& p : points)
    if (p.size() != s.dimension) throw DataError("samples have inconsistent dimension");
  s.samples = std::move(points);
  s.offset = Eigen::VectorXd::Zero(s.dimension);
  s.scale = Eigen::VectorXd::Ones(s.dimension);
  for (int k = 0; k < s.dimension; ++k) s.columns.push_back("x" + std::to_string(k + 1));
  return s;
}

Eigen::MatrixXd EmpiricalMomentMatrix::regularized() const {
  return M + epsilon * Eigen::MatrixXd::Identity(M.rows(), M.cols());
}

double default_epsilon(const Eigen::MatrixXd& M) { return 1e-8 * M.trace() / static_cast<double>(M.rows()); }

namespace {

Eigen::VectorXd features(const std::vector<ExponentVector>& basis, std::span<const double> z) {
  Eigen::VectorXd phi(static_cast<Eigen::Index>(basis.size()));
  for (size_t i = 0; i < basis.size(); ++i) {
    double v = 1.0;
    for (int k = 0; k < basis[i].size(); ++k)
      for (int p = 0; p < basis[i][k]; ++p) v *= z[static_cast<size_t>(k)];
    phi(static_cast<Eigen::Index>(i)) = v;
  }
  return phi;
}

}  // namespace

EmpiricalMomentMatrix empirical_moment_matrix(const SampleSet& s, int degree, double epsilon, int side_cap) {
  if (s.samples.empty()) throw DataError("empirical moment matrix: no samples");
  if (degree < 0) throw std::invalid_argument("empirical moment matrix: negative degree");
  const long long side = basis_size(s.dimension, degree);
  if (side > side_cap)
    throw std::invalid_argument("empirical moment matrix: side " + std::to_string(side) + " exceeds cap " +
                                std::to_string(side_cap) + " (lower the Christoffel degree)");
  EmpiricalMomentMatrix m;
  m.space = VariableSpace::make(s.dimension, 0, false);
  m.degree = degree;
  m.basis = enumerate_basis(m.space, degree);
  m.M = Eigen::MatrixXd::Zero(side, side);
  for (const auto& z : s.samples) {
    const Eigen::VectorXd phi = features(m.basis, std::span<const double>(z.data(), static_cast<size_t>(z.size())));
    m.M.selfadjointView<Eigen::Lower>().rankUpdate(phi);
  }
  m.M = m.M.selfadjointView<Eigen::Lower>();
  m.M /= static_cast<double>(s.samples.size());
  m.epsilon = epsilon < 0.0 ? default_epsilon(m.M) : epsilon;
  return m;
}

namespace {

Eigen::MatrixXd inverse_of(const EmpiricalMomentMatrix& m) {
  const Eigen::MatrixXd R = m.regularized();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(R);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(R, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff(), lmin = eig.eigenvalues().minCoeff();
  if (ldlt.info() != Eigen::Success || !(lmin > 1e-14 * std::max(1.0, lmax)))
    throw std::invalid_argument("christoffel: moment matrix is singular (increase epsilon or add samples)");
  return ldlt.solve(Eigen::MatrixXd::Identity(R.rows(), R.cols()));
}

}  // namespace

Polynomial christoffel_poly(const EmpiricalMomentMatrix& m) {
  const Eigen::MatrixXd W = inverse_of(m);
  Polynomial out(m.space);
  const int s = m.side();
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) out.add_term(m.basis[static_cast<size_t>(i)] + m.basis[static_cast<size_t>(j)], W(i, j));
  return out;
}

double christoffel_value(const EmpiricalMomentMatrix& m, std::span<const double> z) {
  const Eigen::VectorXd phi = features(m.basis, z);
  return phi.dot(m.regularized().ldlt().solve(phi));
}

Polynomial lift_christoffel(const Polynomial& lambda, const SampleSet& s, const VariableSpace& target,
                            std::span<const int> target_index) {
  std::vector<double> off(static_cast<size_t>(s.dimension)), sc(static_cast<size_t>(s.dimension));
  for (int k = 0; k < s.dimension; ++k) {
    off[static_cast<size_t>(k)] = -s.offset(k) / s.scale(k);
    sc[static_cast<size_t>(k)] = 1.0 / s.scale(k);
  }
  return lambda.affine_substitute(off, sc).embed(target, target_index);
}

}  // namespace mfp
