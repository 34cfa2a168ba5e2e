#include <doctest.h>

#include <random>

#include "ocdual/functional.hpp"
#include "ocdual/lqr.hpp"
#include "ocdual/oracles.hpp"

#include "test_helpers.hpp"

using namespace ocdual;

namespace {

QqrProblem singular_c_problem(double x0 = 0.8) {
  // m = 2 with C = diag(2, 0) and N = [1 0]: the second control channel is
  // pure gauge; the dual solve needs no invertibility.
  QqrProblem pb;
  pb.n = 1;
  pb.m = 2;
  pb.T = 1.0;
  pb.B = Mat::Constant(1, 1, 2.0);
  pb.C = Mat::Zero(2, 2);
  pb.C(0, 0) = 2.0;
  pb.G = Mat::Zero(1, 1);
  pb.M = Mat::Constant(1, 1, 1.0);
  pb.N = Mat::Zero(1, 2);
  pb.N(0, 0) = 1.0;
  pb.A = VectorSignal::zero(1);
  pb.x0 = Vec::Constant(1, x0);
  pb.lambda0 = Vec::Zero(1);
  pb.base = BaseState::zero(1, 2);
  pb.validate();
  return pb;
}

}  // namespace

TEST_CASE("hand-computed one-element system") {
  // M = N = 0, B = C = 0, unit weights on [0, 2]: the bilinear form reduces
  // to the derivative pairings; with one element the free dofs are
  // (gamma_0, lambda_1, mu_0) and the matrix is diag(1/T, 1/T, 0).
  QqrProblem pb;
  pb.n = 1;
  pb.m = 1;
  pb.T = 2.0;
  pb.B = Mat::Zero(1, 1);
  pb.C = Mat::Zero(1, 1);
  pb.G = Mat::Zero(1, 1);
  pb.M = Mat::Zero(1, 1);
  pb.N = Mat::Zero(1, 1);
  pb.A = VectorSignal::zero(1);
  pb.x0 = Vec::Zero(1);
  pb.lambda0 = Vec::Zero(1);
  pb.base = BaseState::zero(1, 1);
  pb.validate();
  RitzBasis basis(TimeGrid::uniform(2.0, 1), pb);
  Mat m = assemble_bilinear(pb, basis);
  REQUIRE(m.rows() == 3);
  Mat expected = Mat::Zero(3, 3);
  expected(basis.gamma_dof(0, 0), basis.gamma_dof(0, 0)) = 0.5;
  expected(basis.lambda_dof(1, 0), basis.lambda_dof(1, 0)) = 0.5;
  CHECK((m - expected).norm() <= 1e-14);
}

TEST_CASE("matrix is psd, symmetric, and independent of x0 and forcing") {
  std::mt19937 rng(13);
  QqrProblem pb = testing::random_lqr(rng);
  pb.grid_elements = 30;
  RitzBasis basis(TimeGrid::uniform(pb.T, 30), pb);
  Mat m1 = assemble_bilinear(pb, basis);
  CHECK((m1 - m1.transpose()).norm() <= 1e-12 * (1.0 + m1.norm()));
  Eigen::SelfAdjointEigenSolver<Mat> es(m1);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10 * m1.norm());

  QqrProblem pb2 = pb;
  pb2.x0 = Vec::Constant(pb.n, 7.0);
  pb2.A = VectorSignal::constant(Vec::Constant(pb.n, 3.0));
  Mat m2 = assemble_bilinear(pb2, basis);
  CHECK((m1 - m2).norm() == 0.0);
}

TEST_CASE("load vector locality and zero case") {
  QqrProblem pb = make_example_problem(0.0, 0.0, 1.0, 8);
  RitzBasis basis(TimeGrid::uniform(1.0, 8), pb);
  CHECK(assemble_load(pb, basis).norm() == 0.0);

  QqrProblem pb1 = make_example_problem(-1.0, 0.0, 1.0, 8);  // x0 = +1
  Vec f = assemble_load(pb1, basis);
  CHECK(f[basis.gamma_dof(0, 0)] == 1.0);
  f[basis.gamma_dof(0, 0)] = 0.0;
  CHECK(f.norm() == 0.0);
}

TEST_CASE("example problem solve matches the closed form") {
  QqrProblem pb = make_example_problem(1.0, 0.0, 1.0, 100);
  RitzBasis basis(TimeGrid::uniform(1.0, 100), pb);
  LqrSolution sol = solve_lqr(pb, basis);
  REQUIRE(sol.report.finite);
  PrimalTriple exact = example_primal(1.0, 1.0, basis.grid());
  double err = std::max(
      {(sol.primal.x - exact.x).cwiseAbs().maxCoeff(),
       (sol.primal.u - exact.u).cwiseAbs().maxCoeff(),
       (sol.primal.p - exact.p).cwiseAbs().maxCoeff()});
  CHECK(err <= 1e-3);

  // Discrete optimality: gradient of the functional at the solution.
  Vec load = assemble_load(pb, basis);
  Vec grad = eval_gradient(pb, basis, sol.dual);
  CHECK(grad.norm() <= 1e-8 * (1.0 + load.norm()));
  CHECK(sol.report.system_residual <= 1e-10 * (1.0 + load.norm()));

  // Recovered control and co-state satisfy p = 2u at element midpoints
  // (rows 1, 3, 5, ... of the sample set).
  for (int r = 1; r < sol.primal.size(); r += 2) {
    CHECK(std::abs(sol.primal.p(r, 0) - 2.0 * sol.primal.u(r, 0)) <= 1e-6);
  }
}

TEST_CASE("zero data gives the zero dual state and zero trajectories") {
  QqrProblem pb = make_example_problem(0.0, 0.0, 1.0, 40);
  RitzBasis basis(TimeGrid::uniform(1.0, 40), pb);
  LqrSolution sol = solve_lqr(pb, basis);
  CHECK(basis.coeffs_from_field(sol.dual).norm() <= 1e-14);
  CHECK(sol.primal.x.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(sol.primal.u.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(sol.primal.p.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(sol.report.functional_value == 0.0);
}

TEST_CASE("anchor choice leaves the primal solution alone") {
  QqrProblem pb0 = make_example_problem(1.0, 0.0, 1.0, 100);
  QqrProblem pb1 = make_example_problem(1.0, 1.0, 1.0, 100);
  RitzBasis basis(TimeGrid::uniform(1.0, 100), pb0);
  RitzBasis basis1(TimeGrid::uniform(1.0, 100), pb1);
  LqrSolution s0 = solve_lqr(pb0, basis);
  LqrSolution s1 = solve_lqr(pb1, basis1);
  CHECK((s0.primal.x - s1.primal.x).cwiseAbs().maxCoeff() <= 2e-3);
  CHECK((s0.primal.u - s1.primal.u).cwiseAbs().maxCoeff() <= 2e-3);
  double dual_gap =
      std::max((s0.dual.gamma - s1.dual.gamma).cwiseAbs().maxCoeff(),
               (s0.dual.lambda - s1.dual.lambda).cwiseAbs().maxCoeff());
  CHECK(dual_gap >= 0.1);
}

TEST_CASE("wrong-solver guard") {
  QqrProblem pb = testing::small_qqr();
  RitzBasis basis(TimeGrid::uniform(1.0, 10), pb);
  CHECK_THROWS_AS(assemble_bilinear(pb, basis), NotApplicableError);
  CHECK_THROWS_AS(solve_lqr(pb, basis), NotApplicableError);
}

TEST_CASE("singular control cost is handled by the dual solve") {
  QqrProblem pb = singular_c_problem();
  RitzBasis basis(TimeGrid::uniform(1.0, 100), pb);
  LqrSolution sol = solve_lqr(pb, basis);
  REQUIRE(sol.report.finite);
  // The gauge control channel stays at the base value 0.
  CHECK(sol.primal.u.col(1).cwiseAbs().maxCoeff() <= 1e-12);
  ShootingResult shot = solve_shooting(pb, basis.grid());
  REQUIRE(shot.converged);
  CHECK((sol.primal.x - shot.trajectory.x).cwiseAbs().maxCoeff() <= 1e-2);
  CHECK((sol.primal.u - shot.trajectory.u).cwiseAbs().maxCoeff() <= 1e-2);
  CHECK((sol.primal.p - shot.trajectory.p).cwiseAbs().maxCoeff() <= 1e-2);
}

TEST_CASE("cached factorization reproduces fresh solves") {
  QqrProblem pb1 = make_example_problem(-1.0, 0.0, 1.0, 60);  // x0 = 1
  QqrProblem pb7 = make_example_problem(-7.0, 0.0, 1.0, 60);  // x0 = 7
  RitzBasis basis(TimeGrid::uniform(1.0, 60), pb1);
  LqrFactorization facto(pb1, basis);
  for (const QqrProblem& pb : {pb1, pb7}) {
    LqrSolution fresh = solve_lqr(pb, basis);
    LqrSolution cached = solve_lqr_cached(pb, basis, facto);
    CHECK((fresh.dual.gamma - cached.dual.gamma).norm() == 0.0);
    CHECK((fresh.dual.lambda - cached.dual.lambda).norm() == 0.0);
    CHECK((fresh.dual.mu - cached.dual.mu).norm() == 0.0);
    CHECK(fresh.report.rank == cached.report.rank);
  }
}

TEST_CASE("forced problem matches the shooting baseline") {
  QqrProblem pb = make_example_problem(1.0, 0.0, 1.0, 100);
  pb.A = VectorSignal::constant(Vec::Constant(1, 0.5));
  RitzBasis basis(TimeGrid::uniform(1.0, 100), pb);
  LqrSolution sol = solve_lqr(pb, basis);
  ShootingResult shot = solve_shooting(pb, basis.grid());
  REQUIRE(shot.converged);
  CHECK((sol.primal.x - shot.trajectory.x).cwiseAbs().maxCoeff() <= 1e-2);
  CHECK((sol.primal.u - shot.trajectory.u).cwiseAbs().maxCoeff() <= 1e-2);
  CHECK((sol.primal.p - shot.trajectory.p).cwiseAbs().maxCoeff() <= 1e-2);
}

TEST_CASE("galerkin orthogonality at the solution") {
  std::mt19937 rng(99);
  QqrProblem pb = testing::random_lqr(rng);
  RitzBasis basis(TimeGrid::uniform(pb.T, 40), pb);
  LqrSystem sys = assemble_lqr_system(pb, basis);
  LqrFactorization facto(pb, basis);
  Vec d = facto.solve(sys.load);
  Vec residual = sys.matrix * d - sys.load;
  for (int trial = 0; trial < 20; ++trial) {
    Vec v = testing::random_vector(rng, d.size());
    CHECK(std::abs(v.dot(residual)) <=
          1e-10 * v.norm() * (1.0 + sys.load.norm()));
  }
}
