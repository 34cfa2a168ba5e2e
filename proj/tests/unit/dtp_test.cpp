#include <doctest.h>

#include <random>

#include "ocdual/dtp.hpp"
#include "ocdual/functional.hpp"
#include "ocdual/oracles.hpp"

#include "test_helpers.hpp"

using namespace ocdual;

TEST_CASE("feasibility classification") {
  Mat psd = Mat::Identity(2, 2);
  CHECK(classify_feasibility(psd, Vec::Constant(2, 1.0)) ==
        Feasibility::kPsdInImage);

  Mat semi = Mat::Zero(2, 2);
  semi(0, 0) = 1.0;
  Vec in_kernel(2);
  in_kernel << 0.0, 1.0;
  CHECK(classify_feasibility(semi, in_kernel) == Feasibility::kOutOfImage);
  Vec in_image(2);
  in_image << 1.0, 0.0;
  CHECK(classify_feasibility(semi, in_image) == Feasibility::kPsdInImage);

  Mat indef(2, 2);
  indef << 3.0, -3.0, -3.0, 1.0;
  CHECK(classify_feasibility(indef, Vec::Constant(2, 0.1)) ==
        Feasibility::kIndefinite);
}

TEST_CASE("zero dual state returns the base state") {
  QqrProblem pb = testing::small_qqr();
  pb.base.x = VectorSignal::constant(Vec::Constant(1, 0.7));
  pb.base.u = VectorSignal::constant(Vec::Constant(1, -0.3));
  pb.base.p = VectorSignal::constant(Vec::Constant(1, 0.2));
  TimeGrid grid = TimeGrid::uniform(1.0, 4);
  DualField zero = DualField::zero(grid, 1, 1);
  auto im = compute_intermediates(pb, zero, 0.4);
  DtpPoint pt = dtp_map(pb, im, 0.4);
  REQUIRE(pt.feasible);
  CHECK(pt.x[0] == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(pt.u[0] == doctest::Approx(-0.3).epsilon(1e-14));
  CHECK(pt.p[0] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(pt.kkt_residual <= 1e-14);
}

TEST_CASE("diagonal case recovers componentwise differences") {
  // F = 0, a_x = a_p = 1: x = xbar - script_x, p = pbar - script_p.
  QqrProblem pb = testing::small_qqr();
  pb.F.clear();
  pb.base.x = VectorSignal::constant(Vec::Constant(1, 0.5));
  pb.base.p = VectorSignal::constant(Vec::Constant(1, -0.1));
  TimeGrid grid = TimeGrid::uniform(1.0, 4);
  std::mt19937 rng(2);
  RitzBasis basis(grid, pb);
  DualField d = testing::random_feasible_field(pb, basis, rng);
  double t = 0.62;
  auto im = compute_intermediates(pb, d, t);
  DtpPoint pt = dtp_map(pb, im, t);
  REQUIRE(pt.feasible);
  CHECK(pt.x[0] == doctest::Approx(0.5 - im.script_x[0]).epsilon(1e-13));
  CHECK(pt.p[0] == doctest::Approx(-0.1 - im.script_p[0]).epsilon(1e-13));
  CHECK(pt.u[0] == doctest::Approx(-im.script_u[0] / pb.a_u).epsilon(1e-13));
}

TEST_CASE("indefinite matrix is infeasible") {
  Mat indef(2, 2);
  indef << 3.0, -3.0, -3.0, 1.0;
  Vec rhs(2);
  rhs << 0.5, -0.5;
  DtpPoint pt = dtp_map(indef, rhs, Vec::Zero(1), Vec::Zero(1), Vec::Zero(1),
                        Vec::Zero(1), 1.0);
  CHECK_FALSE(pt.feasible);
}

TEST_CASE("minimum-norm solution is orthogonal to the kernel") {
  Mat semi = Mat::Zero(2, 2);
  semi(0, 0) = 2.0;
  Vec rhs(2);
  rhs << 1.0, 0.0;
  DtpPoint pt = dtp_map(semi, rhs, Vec::Zero(1), Vec::Zero(1), Vec::Zero(1),
                        Vec::Zero(1), 1.0);
  REQUIRE(pt.feasible);
  // delta = (x - xbar, p - pbar); kernel is the second axis.
  CHECK(std::abs(pt.p[0]) <= 1e-10);
  CHECK(pt.x[0] == doctest::Approx(-0.5).epsilon(1e-13));
}

TEST_CASE("positive homogeneity around the base state") {
  QqrProblem pb = testing::small_qqr();
  TimeGrid grid = TimeGrid::uniform(1.0, 4);
  std::mt19937 rng(9);
  RitzBasis basis(grid, pb);
  DualField d = testing::random_feasible_field(pb, basis, rng, 0.4);
  double t = 0.31;
  auto im = compute_intermediates(pb, d, t);
  DtpPoint p1 = dtp_map(im.kkt, im.rhs, im.script_u, Vec::Zero(1),
                        Vec::Zero(1), Vec::Zero(1), pb.a_u);
  DtpPoint p2 = dtp_map(im.kkt, 2.0 * im.rhs, 2.0 * im.script_u, Vec::Zero(1),
                        Vec::Zero(1), Vec::Zero(1), pb.a_u);
  REQUIRE(p1.feasible);
  REQUIRE(p2.feasible);
  CHECK(p2.x[0] == doctest::Approx(2.0 * p1.x[0]).epsilon(1e-12));
  CHECK(p2.p[0] == doctest::Approx(2.0 * p1.p[0]).epsilon(1e-12));
  CHECK(p2.u[0] == doctest::Approx(2.0 * p1.u[0]).epsilon(1e-12));
}

TEST_CASE("feasible points maximize the pointwise pre-dual integrand") {
  QqrProblem pb = testing::small_qqr();
  pb.base.x = VectorSignal::constant(Vec::Constant(1, 0.3));
  TimeGrid grid = TimeGrid::uniform(1.0, 6);
  std::mt19937 rng(17);
  RitzBasis basis(grid, pb);
  for (int trial = 0; trial < 5; ++trial) {
    DualField d = testing::random_feasible_field(pb, basis, rng, 0.8);
    double t = 0.1 + 0.15 * trial;
    auto im = compute_intermediates(pb, d, t);
    DtpPoint pt = dtp_map(pb, im, t);
    REQUIRE(pt.feasible);
    double at_max =
        lagrangian_density(pb, im, d.gamma_at(t), t, pt.x, pt.u, pt.p);
    double scale = 1.0 + std::abs(at_max);
    for (int k = 0; k < 100; ++k) {
      Vec dx = testing::random_vector(rng, 1, 0.5);
      Vec du = testing::random_vector(rng, 1, 0.5);
      Vec dp = testing::random_vector(rng, 1, 0.5);
      double perturbed = lagrangian_density(pb, im, d.gamma_at(t), t,
                                            pt.x + dx, pt.u + du, pt.p + dp);
      CHECK(perturbed <= at_max + 1e-9 * scale);
    }
  }
}

TEST_CASE("non-symmetric kkt matrix is a contract violation") {
  Mat bad(2, 2);
  bad << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(dtp_map(bad, Vec::Zero(2), Vec::Zero(1), Vec::Zero(1),
                          Vec::Zero(1), Vec::Zero(1), 1.0),
                  std::invalid_argument);
}
