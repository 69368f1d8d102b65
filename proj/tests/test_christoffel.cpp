#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "momentfp/christoffel.hpp"

using namespace mfp;

namespace {

std::string write_tmp(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / ("momentfp_test_" + name);
  std::ofstream(p) << body;
  return p.string();
}

std::vector<Eigen::VectorXd> random_points(std::mt19937& rng, int n, int dim) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<Eigen::VectorXd> out;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v(dim);
    for (int k = 0; k < dim; ++k) v(k) = U(rng);
    out.push_back(v);
  }
  return out;
}

Eigen::VectorXd pt(std::initializer_list<double> l) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(l.size()));
  Eigen::Index i = 0;
  for (double x : l) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("two-point set gives identity moment matrix and 1 + x^2") {
  const auto s = make_sample_set({pt({-1.0}), pt({1.0})});
  const auto m = empirical_moment_matrix(s, 1, 0.0);
  CHECK((m.M - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-15);
  CHECK(christoffel_poly(m) == Polynomial::parse("1 + x1^2", m.space));
}

TEST_CASE("degree zero gives the constant 1") {
  std::mt19937 rng(3);
  const auto s = make_sample_set(random_points(rng, 7, 3));
  const auto m = empirical_moment_matrix(s, 0, 0.0);
  CHECK(m.M.rows() == 1);
  CHECK(m.M(0, 0) == 1.0);
  CHECK(christoffel_poly(m) == Polynomial::constant(m.space, 1.0));
}

TEST_CASE("single sample gives a rank-one matrix") {
  const auto s = make_sample_set({pt({0.5, -0.25})});
  const auto m = empirical_moment_matrix(s, 2, 0.0);
  CHECK(m.side() == 6);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m.M);
  CHECK(lu.rank() == 1);
  CHECK_THROWS_AS(christoffel_poly(m), std::invalid_argument);
}

TEST_CASE("trace identity on random sample sets") {
  std::mt19937 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const int dim = 1 + rep % 3, dc = 2 + rep % 3;
    const int side = static_cast<int>(basis_size(dim, dc));
    const auto s = make_sample_set(random_points(rng, 3 * side, dim));
    const auto m = empirical_moment_matrix(s, dc, 0.0);
    const auto L = christoffel_poly(m);
    double mean = 0.0;
    for (const auto& z : s.samples) mean += L.evaluate(std::span<const double>(z.data(), static_cast<size_t>(dim)));
    mean /= static_cast<double>(s.samples.size());
    CHECK(std::abs(mean - side) / side < 1e-6);
  }
}

TEST_CASE("expanded polynomial matches the quadratic form") {
  std::mt19937 rng(5);
  const auto s = make_sample_set(random_points(rng, 60, 2));
  const auto m = empirical_moment_matrix(s, 3);
  CHECK(m.epsilon == doctest::Approx(1e-8 * m.M.trace() / m.side()));
  const auto L = christoffel_poly(m);
  CHECK(L.degree() == 6);
  for (const auto& z : random_points(rng, 30, 2)) {
    const std::span<const double> zs(z.data(), 2);
    const double direct = christoffel_value(m, zs);
    CHECK(std::abs(L.evaluate(zs) - direct) <= 1e-8 * std::abs(direct));
  }
}

TEST_CASE("regularized matrix is positive definite and Lambda is positive") {
  std::mt19937 rng(8);
  const auto s = make_sample_set(random_points(rng, 4, 2));  // fewer samples than the side
  const auto m = empirical_moment_matrix(s, 2, 1e-3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.regularized());
  CHECK(es.eigenvalues().minCoeff() >= 1e-3 - 1e-12);
  const auto L = christoffel_poly(m);
  double lo = INFINITY;
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 40; ++j) {
      const double z[2] = {-1.5 + 0.075 * i, -1.5 + 0.075 * j};
      lo = std::min(lo, L.evaluate(z));
    }
  CHECK(lo > 0.0);
}

TEST_CASE("adding a sample at z does not increase Lambda(z)") {
  std::mt19937 rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    const int dim = 1 + rep % 2;
    auto pts = random_points(rng, 25, dim);
    const auto z = random_points(rng, 1, dim).front();
    const std::span<const double> zs(z.data(), static_cast<size_t>(dim));
    const auto before = empirical_moment_matrix(make_sample_set(pts), 2, 1e-6);
    pts.push_back(z);
    // Same epsilon for both, so the comparison is on the data term only.
    const auto after = empirical_moment_matrix(make_sample_set(pts), 2, 1e-6);
    CHECK(christoffel_value(after, zs) <= christoffel_value(before, zs) * (1.0 + 1e-10));
  }
}

TEST_CASE("side cap") {
  const auto s = make_sample_set({pt({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7})});
  CHECK_NOTHROW(empirical_moment_matrix(s, 4));  // side C(11,4) = 330
  CHECK_THROWS_AS(empirical_moment_matrix(s, 5), std::invalid_argument);  // side 792
  CHECK_NOTHROW(empirical_moment_matrix(s, 2));
  CHECK_THROWS_AS(empirical_moment_matrix(s, 2, -1.0, 10), std::invalid_argument);
}

TEST_CASE("load_samples parses and normalizes") {
  const auto path = write_tmp("ok.csv", "a,b,c\n1,10,0\n3,20,0\n2,15,0\n1,10,0\n");
  const auto s = load_samples(path, {"c", "a"});
  CHECK(s.samples.size() == 4);
  CHECK(s.dimension == 2);
  CHECK(s.columns == std::vector<std::string>{"c", "a"});
  CHECK(s.scale(0) == 1.0);  // constant column
  CHECK(s.samples[1](1) == doctest::Approx(1.0));
  CHECK(s.samples[0](1) == doctest::Approx(-1.0));
  CHECK(s.denormalize(s.samples[2])(1) == doctest::Approx(2.0));

  const auto unit = write_tmp("unit.csv", "x,y\n-1,0.5\n1,-0.5\n0,1\n");
  const auto id = load_samples(unit, {"x", "y"}, NormalizationBox{-Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(2)});
  CHECK(id.offset.norm() == 0.0);
  CHECK(id.scale == Eigen::VectorXd::Ones(2));
  CHECK(id.samples[0] == pt({-1.0, 0.5}));

  const auto semi = write_tmp("semi.csv", "x;y\n1;2\n3;4\n");
  CHECK(load_samples(semi, {"y"}, std::nullopt, ';').samples.size() == 2);
}

TEST_CASE("load_samples errors") {
  const auto bad = write_tmp("bad.csv", "x,y\n1,2\n3,abc\n");
  try {
    load_samples(bad, {"x", "y"});
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 3") != std::string::npos);
    CHECK(msg.find("'y'") != std::string::npos);
  }
  try {
    load_samples(bad, {"z"});
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("missing column 'z'") != std::string::npos);
  }
  CHECK_THROWS_AS(load_samples(write_tmp("empty.csv", ""), {"x"}), DataError);
  CHECK_THROWS_AS(load_samples(write_tmp("header.csv", "x\n"), {"x"}), DataError);
  CHECK_THROWS_AS(load_samples("/nonexistent/file.csv", {"x"}), DataError);
}

TEST_CASE("lifting into the scenario space") {
  const auto s = make_sample_set({pt({-1.0}), pt({1.0})});
  const auto L = christoffel_poly(empirical_moment_matrix(s, 1, 0.0));
  const auto target = VariableSpace::make(2, 1);
  const int idx[] = {target.indices(BlockKind::state)[1]};
  CHECK(lift_christoffel(L, s, target, idx) == Polynomial::parse("1 + x2^2", target));

  auto raw = s;
  raw.offset = Eigen::VectorXd::Constant(1, 2.0);
  raw.scale = Eigen::VectorXd::Constant(1, 0.5);
  // z = (x - 2) / 0.5, so Lambda = 1 + 4 (x - 2)^2
  CHECK(lift_christoffel(L, raw, target, idx) == Polynomial::parse("17 + -16 * x2 + 4 * x2^2", target));
}
