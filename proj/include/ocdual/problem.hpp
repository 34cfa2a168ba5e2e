#pragma once

#include <optional>
#include <vector>

#include "ocdual/common.hpp"
#include "ocdual/signal.hpp"

namespace ocdual {

// Fixed data of the quadratic-quadratic regulator
//
//   maximize  -∫ ½(x·Bx + u·Cu) dt - x(T)·G x(T)
//   s.t.      ẋ = A(t) + Mx + Nu + ½ xFx,   x(0) = x0,
//
// together with the dual-side parameters: the anchor lambda0 for λ(0), the
// weights (a_x, a_u, a_p) of the auxiliary potential, and the base state.
struct QqrProblem {
  int n = 0;  // state dimension
  int m = 0;  // control dimension
  double T = 1.0;

  Mat B;  // n x n state cost, symmetric PSD
  Mat C;  // m x m control cost, symmetric PSD
  Mat G;  // n x n terminal cost, symmetric PSD
  Mat M;  // n x n dynamics
  Mat N;  // n x m control input
  // Quadratic dynamics tensor, slice i holds F_i(r,s) = F_irs; each slice
  // symmetric. Empty or all-zero slices mean an LQR problem.
  std::vector<Mat> F;

  VectorSignal A;  // forcing
  Vec x0;
  Vec lambda0;

  double a_x = 1.0;
  double a_u = 1.0;
  double a_p = 1.0;

  BaseState base;

  int grid_elements = 100;                       // default uniform grid
  std::optional<std::vector<double>> grid_nodes;  // explicit nodes override

  // Throws std::invalid_argument on dimension mismatches or violated
  // invariants (symmetry, PSD within -1e-10 relative, F last-two-index
  // symmetry, positive weights).
  void validate() const;

  bool is_lqr() const;
  double tensor_norm() const;  // Frobenius norm of F

  // (γF)_ir = γ_k F_kir; symmetric because the slices are.
  Mat gamma_contraction(const Vec& gamma) const;
  // (Fλ)_ir = F_irk λ_k.
  Mat lambda_contraction(const Vec& lambda) const;
  // (xFx)_i = F_irs x_r x_s.
  Vec quadratic_dynamics(const Vec& x) const;
  // (pF·x)_i = p_j F_jri x_r, the tensor term of the co-state equation.
  Vec costate_coupling(const Vec& p, const Vec& x) const;

  // Dynamics right-hand side A + Mx + Nu + ½ xFx.
  Vec dynamics_rhs(double t, const Vec& x, const Vec& u) const;

  // Copy with the quadratic tensor removed (preconditioning, LQR checks).
  QqrProblem linearized() const;
};

}  // namespace ocdual
