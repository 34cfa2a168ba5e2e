#pragma once

#include <optional>
#include <vector>

#include "ocdual/common.hpp"
#include "ocdual/dual_field.hpp"
#include "ocdual/problem.hpp"
#include "ocdual/time_grid.hpp"

namespace ocdual {

// Sampled (x, u, p) trajectories, one row per time stamp.  Oracles with
// closed forms may attach analytic derivatives; residual checks fall back to
// finite differences otherwise.
struct PrimalTriple {
  std::vector<double> t;
  Mat x;  // len x n
  Mat u;  // len x m
  Mat p;  // len x n
  std::optional<Mat> x_dot;
  std::optional<Mat> p_dot;

  int size() const { return static_cast<int>(t.size()); }
};

// Nodes and element midpoints, sorted: the shared sampling set for emitted
// trajectories (u is exactly representable at midpoints; nodal values use
// second-order one-sided/central derivative estimates).
std::vector<double> sample_times(const TimeGrid& grid);

// Recovers the primal trajectories from a dual field via the DtP map at the
// shared sampling set.  Throws std::domain_error if a sample point is
// infeasible.
PrimalTriple recover_primal(const QqrProblem& pb, const DualField& d);

// Norms of the five primal-system residuals.
struct ResidualReport {
  double state_l2 = 0, state_max = 0;      // ẋ - A - Mx - Nu - ½xFx
  double costate_l2 = 0, costate_max = 0;  // ṗ - Bx + Mᵀp + pF·x
  double control_l2 = 0, control_max = 0;  // Nᵀp - Cu
  double terminal = 0;                     // |p(T) + G x(T)|
  double initial = 0;                      // |x(0) - x0|

  double max_norm() const;
};

// Central differences in the interior, second-order one-sided at the ends;
// analytic derivatives are used when the triple carries them.  Fewer than 3
// samples is an error.
ResidualReport residual_primal(const PrimalTriple& primal,
                               const QqrProblem& pb);

// Turns a sampled trajectory into base-state signals: Hermite interpolation
// when derivatives are attached (u 's derivative via C⁺Nᵀṗ), linear tables
// otherwise.
BaseState base_from_trajectory(const QqrProblem& pb,
                               const PrimalTriple& primal);

}  // namespace ocdual
