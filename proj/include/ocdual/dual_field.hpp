#pragma once

#include "ocdual/common.hpp"
#include "ocdual/problem.hpp"
#include "ocdual/time_grid.hpp"

namespace ocdual {

// Dual triple (γ, λ, μ) on a grid: γ, λ continuous piecewise linear (one row
// of nodal values per node), μ piecewise constant (one row per element).
// Plain data; the boundary constraints are the RitzBasis's responsibility.
struct DualField {
  TimeGrid grid = TimeGrid::uniform(1.0, 1);
  Mat gamma;   // (K+1) x n nodal values
  Mat lambda;  // (K+1) x n
  Mat mu;      // K x m element values

  static DualField zero(const TimeGrid& grid, int n, int m);

  Vec gamma_at(double t) const;
  Vec lambda_at(double t) const;
  Vec mu_at(double t) const;  // element lookup
  // Element-local slopes (the only derivative ever taken of the hats).
  Vec gamma_slope(int element) const;
  Vec lambda_slope(int element) const;
};

// Pointwise quantities the functional, the DtP map, and the assembly share:
//   script_x = γ̇ + Mᵀγ + Bᵀλ
//   script_p = λ̇ - Mλ - Nμ
//   script_u = Nᵀγ + Cμ
//   bar_x    = (γF)x̄ - contraction of (Fλ) against p̄
//   bar_p    = -(Fλ)x̄
//   rhs      = (script_x + bar_x, script_p + bar_p) stacked into ℝ^{2n}
//   kkt      = [[a_x I + (γF), -(Fλ)ᵀ], [-(Fλ), a_p I]], symmetric by
//              construction from the tensor's last-two-index symmetry.
struct DualIntermediates {
  Vec script_x, script_p, script_u;
  Vec bar_x, bar_p;
  Vec rhs;
  Mat kkt;
};

// Pointwise evaluations with the right-element derivative convention at
// nodes.  t outside [0, T] is a domain error.
Vec eval_script_x(const QqrProblem& pb, const DualField& d, double t);
Vec eval_script_p(const QqrProblem& pb, const DualField& d, double t);
Vec eval_script_u(const QqrProblem& pb, const DualField& d, double t);
std::pair<Vec, Vec> eval_bars(const QqrProblem& pb, const DualField& d,
                              double t);
Mat assemble_kkt(const QqrProblem& pb, const Vec& gamma, const Vec& lambda);
Vec assemble_rhs(const QqrProblem& pb, const DualField& d, double t);

DualIntermediates compute_intermediates(const QqrProblem& pb,
                                        const DualField& d, double t);

// Same quantities from explicitly supplied point values; lets callers use
// their own derivative estimates (primal recovery, quadrature loops).
DualIntermediates intermediates_from_values(
    const QqrProblem& pb, const Vec& gamma, const Vec& gamma_dot,
    const Vec& lambda, const Vec& lambda_dot, const Vec& mu, double t);

}  // namespace ocdual
