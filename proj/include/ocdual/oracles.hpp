#pragma once

#include <vector>

#include "ocdual/basis.hpp"
#include "ocdual/common.hpp"
#include "ocdual/trajectory.hpp"

namespace ocdual {

// Independent baselines, deliberately discretized differently from the dual
// solver (fixed-step RK4 on fine grids) so that agreement is evidence.

inline constexpr int kOracleSteps = 2000;

// Classical LQR feedback via the backward matrix Riccati equation
//   K̇ + KM + MᵀK + K N C⁻¹Nᵀ K - B = 0,  K(T) = -G,
// then ẋ = (M + NC⁻¹NᵀK)x, u = C⁻¹NᵀKx, p = Kx.  Requires F = 0, A = 0 and
// invertible C (NotApplicableError otherwise); K blow-up raises
// FiniteEscapeError.
class FiniteEscapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RiccatiSolution {
  std::vector<double> k_times;      // fine grid, ascending
  std::vector<Mat> k_matrices;      // K at k_times
  PrimalTriple trajectory;          // sampled at the dual grid's sample set
  Mat k_at(double t) const;         // linear interpolation
};

RiccatiSolution solve_riccati(const QqrProblem& pb, const TimeGrid& grid);

// Single shooting on the two-point BVP: Newton on p(0) against the terminal
// residual p(T) + G x(T), forward RK4 for the coupled (x, p) system with
// u from the min-norm solve of Cu = Nᵀp.  Works for F != 0.  Returns the
// triple sampled at the dual grid's sample set with RHS-derived derivatives
// attached.
struct ShootingResult {
  PrimalTriple trajectory;
  bool converged = false;
  double terminal_residual = 0.0;
  int newton_iterations = 0;
};

ShootingResult solve_shooting(const QqrProblem& pb, const TimeGrid& grid);

// Closed-form primal and dual solution of the scalar example problem
//   maximize -∫ x² + u² dt,  ẋ = x + u,  x(0) = -x0  (G = 0, T given).
// The primal components are independent of lambda0.  mu is reported in the
// example's own sign orientation; negate it for this library's dual fields.
struct ExamplePoint {
  double x, u, p;
  double gamma, lambda, mu;
  double x_dot, u_dot, p_dot;
};

ExamplePoint example_solution(double x0, double lambda0, double T, double t);

// The example problem as a QqrProblem (n = m = 1, M = N = 1, B = C = 2,
// G = 0, A = 0, initial state -x0).
QqrProblem make_example_problem(double x0, double lambda0, double T,
                                int grid_elements);

// Closed-form trajectories sampled at a grid's sample set, with analytic
// (complex-step) derivatives attached.
PrimalTriple example_primal(double x0, double T, const TimeGrid& grid);

// The example's dual solution as a DualField in this library's sign
// convention (mu negated relative to ExamplePoint).
DualField example_dual_field(double x0, double lambda0, const RitzBasis& basis);

// (e^{AT})_22 for the example's Hamiltonian matrix A = [[1, 1/2], [2, -1]];
// nonzero means the primal solution is unique.
double primal_uniqueness_check(double T);

}  // namespace ocdual
