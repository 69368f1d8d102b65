#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>

#include "momentfp/conic.hpp"

using namespace mfp;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ConicProgram make_program(std::vector<Cone> cones, const MatrixXd& A, VectorXd b, VectorXd c) {
  ConicProgram p;
  p.cones = std::move(cones);
  p.num_vars = 0;
  for (const auto& k : p.cones) p.num_vars += k.dim();
  p.A = A.sparseView();
  p.b = std::move(b);
  p.c = std::move(c);
  return p;
}

// minimize x  s.t. [[x, 1], [1, x]] PSD, written with a free x and a PSD slack.
ConicProgram psd_two_by_two() {
  MatrixXd A = MatrixXd::Zero(3, 4);
  // slack svec order: (0,0), (1,0)*sqrt2, (1,1)
  A(0, 0) = 1;
  A(0, 1) = -1;  // x - S00 = 0
  A(1, 2) = 1;   // sqrt2 * S10 = sqrt2
  A(2, 0) = 1;
  A(2, 3) = -1;  // x - S11 = 0
  VectorXd b(3);
  b << 0, M_SQRT2, 0;
  VectorXd c = VectorXd::Zero(4);
  c(0) = 1;
  return make_program({{Cone::Kind::free, 1}, {Cone::Kind::psd, 2}}, A, b, c);
}

MatrixXd random_symmetric(std::mt19937& rng, int n) {
  std::normal_distribution<double> g;
  MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  return 0.5 * (m + m.transpose());
}

// minimize t  s.t. t I - C PSD  =>  t = lambda_max(C).
ConicProgram max_eigenvalue_program(const MatrixXd& C) {
  const int s = static_cast<int>(C.rows());
  const int nv = 1 + s * (s + 1) / 2;
  const int rows = s * (s + 1) / 2;
  MatrixXd A = MatrixXd::Zero(rows, nv);
  VectorXd b(rows);
  int k = 0;
  for (int j = 0; j < s; ++j)
    for (int i = j; i < s; ++i, ++k) {
      const double sc = i == j ? 1.0 : M_SQRT2;
      // sc * (t delta_ij - C_ij) - S_k = 0
      if (i == j) A(k, 0) = 1.0;
      A(k, 1 + k) = -1.0;
      b(k) = sc * C(i, j);
    }
  VectorXd c = VectorXd::Zero(nv);
  c(0) = 1.0;
  return make_program({{Cone::Kind::free, 1}, {Cone::Kind::psd, s}}, A, b, c);
}

}  // namespace

TEST_CASE("nonnegative variable minimised at zero") {
  auto p = make_program({{Cone::Kind::nonneg, 1}}, MatrixXd::Zero(0, 1), VectorXd(0), VectorXd::Ones(1));
  const auto s = solve(p);
  CHECK(s.status == SolveStatus::optimal);
  CHECK(std::abs(s.primal_objective) < 1e-7);
}

TEST_CASE("two-by-two PSD constraint gives objective one") {
  const auto s = solve(psd_two_by_two());
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.primal_objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.dual_objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.residuals.primal <= 1e-8);
  CHECK(s.residuals.dual <= 1e-8);
  CHECK(s.residuals.gap <= 1e-8);
}

TEST_CASE("contradictory equalities on a free variable are primal infeasible") {
  MatrixXd A(2, 1);
  A << 1, 1;
  VectorXd b(2);
  b << 1, 0;
  auto p = make_program({{Cone::Kind::free, 1}}, A, b, VectorXd::Zero(1));
  const auto s = solve(p);
  CHECK(s.status == SolveStatus::primal_infeasible);
  // Certificate: A'y = 0, b'y > 0.
  CHECK((p.A.transpose() * s.equality_multipliers).norm() < 1e-12);
  CHECK(p.b.dot(s.equality_multipliers) > 0);
}

TEST_CASE("PSD constraint with a negative fixed diagonal is primal infeasible") {
  // [[x, 1], [1, -1]] PSD cannot hold.
  MatrixXd A = MatrixXd::Zero(3, 4);
  A(0, 0) = 1;
  A(0, 1) = -1;
  A(1, 2) = 1;
  A(2, 3) = 1;
  VectorXd b(3);
  b << 0, M_SQRT2, -1;
  VectorXd c = VectorXd::Zero(4);
  c(0) = 1;
  auto p = make_program({{Cone::Kind::free, 1}, {Cone::Kind::psd, 2}}, A, b, c);
  const auto s = solve(p);
  CHECK(s.status == SolveStatus::primal_infeasible);
  CHECK(p.b.dot(s.equality_multipliers) > 0);
}

TEST_CASE("unbounded objective is dual infeasible") {
  auto p = make_program({{Cone::Kind::nonneg, 1}}, MatrixXd::Zero(0, 1), VectorXd(0), -VectorXd::Ones(1));
  CHECK(solve(p).status == SolveStatus::dual_infeasible);
  auto q = make_program({{Cone::Kind::free, 1}}, MatrixXd::Zero(0, 1), VectorXd(0), VectorXd::Ones(1));
  CHECK(solve(q).status == SolveStatus::dual_infeasible);
}

TEST_CASE("maximum eigenvalue matches a dense eigensolver") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const MatrixXd C = random_symmetric(rng, 3 + trial);
    const auto s = solve(max_eigenvalue_program(C));
    REQUIRE(s.status == SolveStatus::optimal);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(C);
    CHECK(s.primal_objective == doctest::Approx(eig.eigenvalues().maxCoeff()).epsilon(1e-7));
    CHECK(s.dual_objective <= s.primal_objective + 1e-7);
  }
}

TEST_CASE("solve is deterministic") {
  std::mt19937 rng(11);
  const auto p = max_eigenvalue_program(random_symmetric(rng, 6));
  const auto a = solve(p), b = solve(p);
  CHECK(a.primal == b.primal);
  CHECK(a.equality_multipliers == b.equality_multipliers);
}

TEST_CASE("svec and smat are inverse on symmetric matrices") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> side(1, 20);
  for (int t = 0; t < 100; ++t) {
    const int n = side(rng);
    const MatrixXd m = random_symmetric(rng, n);
    CHECK((smat(svec(m), n) - m).cwiseAbs().maxCoeff() <= 1e-14);
    const MatrixXd q = random_symmetric(rng, n);
    CHECK(svec(m).dot(svec(q)) == doctest::Approx((m * q).trace()).epsilon(1e-12));
  }
}

TEST_CASE("self_check recomputes residuals independently") {
  const auto p = psd_two_by_two();
  ConicSolution s;
  s.primal = VectorXd(4);
  s.primal << 2, 2, M_SQRT2, 2;  // x = 2, S = [[2,1],[1,2]]
  auto r = self_check(p, s);
  CHECK(r.equality_residual <= 1e-12);
  CHECK(r.min_primal_eig == doctest::Approx(1.0));

  SUBCASE("perturbation shows up scaled by the column norm") {
    s.primal(0) += 1e-3;  // column of x has entries 1, 1
    r = self_check(p, s);
    CHECK(r.equality_residual == doctest::Approx(1e-3).epsilon(1e-9));
  }
  SUBCASE("negative eigenvalue matches a dense eigensolve") {
    MatrixXd S(2, 2);
    S << 1, 0, 0, -1e-2;
    s.primal.tail(3) = svec(S);
    r = self_check(p, s);
    CHECK(std::abs(r.min_primal_eig - (-1e-2)) < 1e-8);
  }
}

TEST_CASE("weak duality holds on returned solutions") {
  std::mt19937 rng(5);
  for (int t = 0; t < 5; ++t) {
    const auto s = solve(max_eigenvalue_program(random_symmetric(rng, 4)), {1e-8, 200, 0});
    CHECK(s.dual_objective <= s.primal_objective + 10 * 1e-8);
  }
}

TEST_CASE("malformed programs are rejected") {
  ConicProgram p = psd_two_by_two();
  p.cones.back().size = 3;
  CHECK_THROWS_AS(solve(p), std::invalid_argument);
  ConicProgram q = psd_two_by_two();
  q.b(0) = std::nan("");
  CHECK_THROWS_AS(solve(q), std::invalid_argument);
}

TEST_CASE("text export lists header, triplets and cones") {
  std::ostringstream os;
  write_program_text(psd_two_by_two(), os);
  const std::string txt = os.str();
  CHECK(txt.rfind("momentfp-conic 1\nvars 4 rows 3 nnz 5 cones 2\n", 0) == 0);
  CHECK(txt.find("cones\nfree 1\npsd 2\n") != std::string::npos);
}
