#include <doctest.h>

#include <random>

#include "ocdual/functional.hpp"
#include "ocdual/lqr.hpp"
#include "ocdual/oracles.hpp"
#include "ocdual/trajectory.hpp"

#include "test_helpers.hpp"

using namespace ocdual;

TEST_CASE("density vanishes on the zero state and matches the quadratic form") {
  QqrProblem pb = testing::small_qqr();
  pb.F.clear();
  TimeGrid grid = TimeGrid::uniform(1.0, 8);
  DualField zero = DualField::zero(grid, 1, 1);
  CHECK(dual_density(pb, zero, 0.3).value == 0.0);

  std::mt19937 rng(4);
  RitzBasis basis(grid, pb);
  DualField d = testing::random_feasible_field(pb, basis, rng);
  double t = 0.47;
  auto im = compute_intermediates(pb, d, t);
  double expected = 0.5 * (im.script_x.squaredNorm() / pb.a_x +
                           im.script_p.squaredNorm() / pb.a_p +
                           im.script_u.squaredNorm() / pb.a_u);
  DensityValue dv = dual_density(pb, d, t);
  REQUIRE(dv.finite);
  CHECK(dv.value == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("density is infinite off the cone") {
  QqrProblem pb = testing::small_qqr();
  pb.F = {Mat::Constant(1, 1, 1.0)};
  TimeGrid grid = TimeGrid::uniform(1.0, 4);
  DualField d = DualField::zero(grid, 1, 1);
  d.gamma.setConstant(-10.0);  // kkt(0,0) = 1 - 10 < 0
  DensityValue dv = dual_density(pb, d, 0.5);
  CHECK_FALSE(dv.finite);

  RitzBasis basis(grid, pb);
  Vec coeffs = Vec::Zero(basis.num_free_dofs());
  for (int j = 0; j < 4; ++j) coeffs[basis.gamma_dof(j, 0)] = -10.0;
  FunctionalValue fv = eval_s_tilde(pb, basis, basis.field_from_coeffs(coeffs));
  CHECK_FALSE(fv.finite);
}

TEST_CASE("functional vanishes at zero data and is stationary at the "
          "interpolated closed-form dual solution") {
  QqrProblem pb = make_example_problem(1.0, 0.0, 1.0, 200);
  TimeGrid grid = TimeGrid::uniform(1.0, 200);
  RitzBasis basis(grid, pb);

  QqrProblem pb0 = pb;
  pb0.x0 = Vec::Zero(1);
  FunctionalValue at_zero = eval_s_tilde(pb0, basis, basis.zero_field());
  CHECK(at_zero.finite);
  CHECK(at_zero.value == 0.0);

  DualField d = example_dual_field(1.0, 0.0, basis);
  FunctionalValue fv = eval_s_tilde(pb, basis, d);
  REQUIRE(fv.finite);
  Vec grad = eval_gradient(pb, basis, d);
  CHECK(grad.norm() <= 1e-3 * (1.0 + std::abs(fv.value)));
}

TEST_CASE("gradient vanishes when the base state solves the primal system") {
  QqrProblem pb = testing::small_qqr();
  TimeGrid grid = TimeGrid::uniform(1.0, 200);
  ShootingResult shot = solve_shooting(pb, grid);
  REQUIRE(shot.converged);
  pb.base = base_from_trajectory(pb, shot.trajectory);
  RitzBasis basis(grid, pb);
  FunctionalValue fv = eval_s_tilde(pb, basis, basis.zero_field());
  REQUIRE(fv.finite);
  Vec grad = eval_gradient(pb, basis, basis.zero_field());
  CHECK(grad.norm() <= 1e-6 * (1.0 + std::abs(fv.value)));
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937 rng(23);
  QqrProblem pb = testing::small_qqr();
  TimeGrid grid = TimeGrid::uniform(1.0, 12);
  RitzBasis basis(grid, pb);
  for (int trial = 0; trial < 3; ++trial) {
    DualField d = testing::random_feasible_field(pb, basis, rng, 0.5);
    Vec g = eval_gradient(pb, basis, d);
    Vec fd = testing::finite_difference_gradient(pb, basis, d);
    CHECK((g - fd).norm() <= 1e-5 * (1.0 + fd.norm()));
  }
}

TEST_CASE("gradient map is affine for zero tensor") {
  QqrProblem pb = testing::small_qqr();
  pb.F.clear();
  pb.A = VectorSignal::constant(Vec::Constant(1, 0.3));
  TimeGrid grid = TimeGrid::uniform(1.0, 10);
  RitzBasis basis(grid, pb);
  std::mt19937 rng(31);
  Vec c1 = testing::random_vector(rng, basis.num_free_dofs());
  Vec c2 = testing::random_vector(rng, basis.num_free_dofs());
  Vec g12 = eval_gradient(pb, basis, basis.field_from_coeffs(c1 + c2));
  Vec g1 = eval_gradient(pb, basis, basis.field_from_coeffs(c1));
  Vec g2 = eval_gradient(pb, basis, basis.field_from_coeffs(c2));
  Vec g0 = eval_gradient(pb, basis, basis.zero_field());
  double scale = 1.0 + g1.norm() + g2.norm();
  CHECK((g12 - g1 - g2 + g0).norm() <= 1e-12 * scale);
}

TEST_CASE("gradient refuses fields at the cone boundary") {
  QqrProblem pb = testing::small_qqr();
  pb.F = {Mat::Constant(1, 1, 1.0)};
  TimeGrid grid = TimeGrid::uniform(1.0, 4);
  RitzBasis basis(grid, pb);
  Vec coeffs = Vec::Zero(basis.num_free_dofs());
  for (int j = 0; j < 4; ++j) coeffs[basis.gamma_dof(j, 0)] = -1.0;
  // kkt(0,0) = 1 + gamma = 0 on the whole interval: boundary of the cone.
  CHECK_THROWS_AS(eval_gradient(pb, basis, basis.field_from_coeffs(coeffs)),
                  std::domain_error);
}

TEST_CASE("element-parallel evaluation is bit-identical to serial") {
  QqrProblem pb = testing::small_qqr();
  TimeGrid grid = TimeGrid::uniform(1.0, 64);
  RitzBasis basis(grid, pb);
  std::mt19937 rng(2024);
  DualField d = testing::random_feasible_field(pb, basis, rng);
  FunctionalValue serial = eval_s_tilde(pb, basis, d, 1);
  FunctionalValue parallel = eval_s_tilde(pb, basis, d, 4);
  CHECK(serial.value == parallel.value);
  Vec gs = eval_gradient(pb, basis, d, 1);
  Vec gp = eval_gradient(pb, basis, d, 4);
  CHECK((gs - gp).norm() == 0.0);

  QqrProblem lin = pb.linearized();
  Mat m1 = assemble_bilinear(lin, basis, 1);
  Mat m4 = assemble_bilinear(lin, basis, 4);
  CHECK((m1 - m4).norm() == 0.0);
}

TEST_CASE("midpoint convexity of the dual functional") {
  QqrProblem pb = testing::small_qqr();
  TimeGrid grid = TimeGrid::uniform(1.0, 30);
  RitzBasis basis(grid, pb);
  std::mt19937 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    DualField d1 = testing::random_feasible_field(pb, basis, rng, 0.7);
    DualField d2 = testing::random_feasible_field(pb, basis, rng, 0.7);
    Vec c1 = basis.coeffs_from_field(d1);
    Vec c2 = basis.coeffs_from_field(d2);
    FunctionalValue f1 = eval_s_tilde(pb, basis, d1);
    FunctionalValue f2 = eval_s_tilde(pb, basis, d2);
    FunctionalValue fm =
        eval_s_tilde(pb, basis, basis.field_from_coeffs(0.5 * (c1 + c2)));
    if (!f1.finite || !f2.finite || !fm.finite) continue;
    double scale = 1.0 + std::abs(f1.value) + std::abs(f2.value);
    CHECK(fm.value <= 0.5 * (f1.value + f2.value) + 1e-9 * scale);
  }
}

TEST_CASE("pre-dual integrand is affine in the dual variables") {
  QqrProblem pb = testing::small_qqr();
  std::mt19937 rng(51);
  Vec x = testing::random_vector(rng, 1), u = testing::random_vector(rng, 1),
      p = testing::random_vector(rng, 1);
  double t = 0.4;
  auto value_at = [&](const Vec& g, const Vec& gd, const Vec& l,
                      const Vec& ld, const Vec& mu) {
    auto im = intermediates_from_values(pb, g, gd, l, ld, mu, t);
    return lagrangian_density(pb, im, g, t, x, u, p);
  };
  for (int trial = 0; trial < 10; ++trial) {
    Vec g1 = testing::random_vector(rng, 1), gd1 = testing::random_vector(rng, 1),
        l1 = testing::random_vector(rng, 1), ld1 = testing::random_vector(rng, 1),
        m1 = testing::random_vector(rng, 1);
    Vec g2 = testing::random_vector(rng, 1), gd2 = testing::random_vector(rng, 1),
        l2 = testing::random_vector(rng, 1), ld2 = testing::random_vector(rng, 1),
        m2 = testing::random_vector(rng, 1);
    double s = 0.37;
    double lhs = value_at(s * g1 + (1 - s) * g2, s * gd1 + (1 - s) * gd2,
                          s * l1 + (1 - s) * l2, s * ld1 + (1 - s) * ld2,
                          s * m1 + (1 - s) * m2);
    double rhs = s * value_at(g1, gd1, l1, ld1, m1) +
                 (1 - s) * value_at(g2, gd2, l2, ld2, m2);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("density equals the integrand at the recovered maximizer") {
  QqrProblem pb = testing::small_qqr();
  pb.base.x = VectorSignal::constant(Vec::Constant(1, 0.2));
  pb.base.u = VectorSignal::constant(Vec::Constant(1, -0.4));
  TimeGrid grid = TimeGrid::uniform(1.0, 25);
  RitzBasis basis(grid, pb);
  std::mt19937 rng(61);
  int checked = 0;
  for (int trial = 0; trial < 80 && checked < 50; ++trial) {
    DualField d = testing::random_feasible_field(pb, basis, rng, 0.6);
    double t = grid.quad_point(trial % grid.num_elements(), trial % 3);
    auto im = compute_intermediates(pb, d, t);
    DtpPoint pt = dtp_map(pb, im, t);
    if (!pt.feasible) continue;
    double density = dual_density(pb, d, t).value;
    double lag = lagrangian_density(pb, im, d.gamma_at(t), t, pt.x, pt.u, pt.p);
    CHECK(density == doctest::Approx(lag).epsilon(1e-10));
    ++checked;
  }
  CHECK(checked >= 50);
}

TEST_CASE("per-element density table sums to the integral part") {
  QqrProblem pb = make_example_problem(1.0, 0.0, 1.0, 30);
  RitzBasis basis(TimeGrid::uniform(1.0, 30), pb);
  std::mt19937 rng(67);
  DualField d = testing::random_feasible_field(pb, basis, rng);
  FunctionalValue fv = eval_s_tilde(pb, basis, d);
  REQUIRE(fv.finite);
  REQUIRE(static_cast<int>(fv.element_density.size()) == 30);
  double sum = 0.0;
  for (double e : fv.element_density) sum += e;
  double boundary = d.gamma.row(0).dot(pb.x0);
  CHECK(sum - boundary == doctest::Approx(fv.value).epsilon(1e-12));
}

TEST_CASE("pointwise lower bound: exactness at zero tensor") {
  CHECK(g_lower_bound(Vec::Zero(2), Vec::Zero(2), Vec::Zero(2), Vec::Zero(2),
                      Vec::Zero(1),
                      [] {
                        QqrProblem pb;
                        pb.n = 2;
                        pb.m = 1;
                        pb.T = 1.0;
                        pb.B = Mat::Identity(2, 2);
                        pb.C = Mat::Identity(1, 1);
                        pb.G = Mat::Zero(2, 2);
                        pb.M = Mat::Zero(2, 2);
                        pb.N = Mat::Zero(2, 1);
                        pb.A = VectorSignal::zero(2);
                        pb.x0 = Vec::Zero(2);
                        pb.lambda0 = Vec::Zero(2);
                        pb.base = BaseState::zero(2, 1);
                        return pb;
                      }()) == 0.0);

  // For F = 0 the bound coincides with the dual density at base 0, A 0.
  std::mt19937 rng(71);
  QqrProblem pb = testing::random_lqr(rng);
  for (int trial = 0; trial < 10; ++trial) {
    Vec gamma = testing::random_vector(rng, pb.n);
    Vec alpha = testing::random_vector(rng, pb.n);
    Vec lambda = testing::random_vector(rng, pb.n);
    Vec beta = testing::random_vector(rng, pb.n);
    Vec mu = testing::random_vector(rng, pb.m);
    auto im = intermediates_from_values(pb, gamma, alpha, lambda, beta, mu,
                                        0.5);
    DensityValue dv = density_from_intermediates(pb, im, gamma, 0.5);
    REQUIRE(dv.finite);
    CHECK(g_lower_bound(gamma, alpha, lambda, beta, mu, pb) ==
          doctest::Approx(dv.value).epsilon(1e-12));
  }
}

TEST_CASE("pointwise lower bound against the brute-force supremum") {
  std::mt19937 rng(81);
  SUBCASE("zero tensor: equality") {
    QqrProblem pb = testing::small_qqr();
    pb.F.clear();
    for (int trial = 0; trial < 5; ++trial) {
      Vec gamma = testing::random_vector(rng, 1), alpha = testing::random_vector(rng, 1),
          lambda = testing::random_vector(rng, 1), beta = testing::random_vector(rng, 1),
          mu = testing::random_vector(rng, 1);
      double bound = g_lower_bound(gamma, alpha, lambda, beta, mu, pb);
      double brute = testing::brute_force_g(pb, gamma, alpha, lambda, beta, mu);
      CHECK(bound == doctest::Approx(brute).epsilon(1e-6));
    }
  }
  SUBCASE("nonzero tensor: lower bound") {
    QqrProblem pb = testing::small_qqr();
    for (int trial = 0; trial < 5; ++trial) {
      Vec gamma = testing::random_vector(rng, 1, 0.8);
      Vec lambda = testing::random_vector(rng, 1, 0.8);
      Mat kkt = assemble_kkt(pb, gamma, lambda);
      Eigen::SelfAdjointEigenSolver<Mat> es(kkt);
      if (es.eigenvalues().minCoeff() < 0.1) continue;  // keep it concave
      Vec alpha = testing::random_vector(rng, 1), beta = testing::random_vector(rng, 1),
          mu = testing::random_vector(rng, 1);
      double bound = g_lower_bound(gamma, alpha, lambda, beta, mu, pb);
      double brute = testing::brute_force_g(pb, gamma, alpha, lambda, beta, mu);
      CHECK(bound <= brute + 1e-9 * (1.0 + std::abs(brute)));
    }
  }
}

TEST_CASE("lower-bound certificate") {
  // Zero data: the zero trajectory certifies a bound of 0 and the functional
  // stays nonnegative.
  QqrProblem pb = testing::small_qqr(0.0);
  pb.F.clear();
  TimeGrid grid = TimeGrid::uniform(1.0, 20);
  RitzBasis basis(grid, pb);
  PrimalTriple zero;
  zero.t = sample_times(grid);
  zero.x = Mat::Zero(zero.t.size(), 1);
  zero.u = Mat::Zero(zero.t.size(), 1);
  zero.p = Mat::Zero(zero.t.size(), 1);
  CHECK(lower_bound_certificate(pb, zero) == 0.0);
  std::mt19937 rng(91);
  for (int trial = 0; trial < 10; ++trial) {
    DualField d = testing::random_feasible_field(pb, basis, rng);
    FunctionalValue fv = eval_s_tilde(pb, basis, d);
    REQUIRE(fv.finite);
    CHECK(fv.value >= -1e-12);
  }

  // Example problem: certificate from the closed forms bounds the functional.
  QqrProblem ex = make_example_problem(1.0, 0.0, 1.0, 20);
  TimeGrid egrid = TimeGrid::uniform(1.0, 200);
  double cert = lower_bound_certificate(ex, example_primal(1.0, 1.0, egrid));
  RitzBasis ebasis(TimeGrid::uniform(1.0, 20), ex);
  for (int trial = 0; trial < 10; ++trial) {
    DualField d = testing::random_feasible_field(ex, ebasis, rng, 2.0);
    FunctionalValue fv = eval_s_tilde(ex, ebasis, d);
    REQUIRE(fv.finite);
    CHECK(fv.value >= cert - 1e-8);
  }
}
