#pragma once

#include <optional>

#include "ocdual/basis.hpp"
#include "ocdual/common.hpp"
#include "ocdual/report.hpp"
#include "ocdual/trajectory.hpp"

namespace ocdual {

struct QqrSolveOptions {
  int max_iters = 500;
  double grad_tol = 1e-8;          // vs (1 + |value|)
  double backtrack_factor = 0.5;   // in (0, 1)
  double sufficient_decrease = 1e-4;
  double cone_margin = 1e-6;       // min eigenvalue slack, scaled by min(a_x, a_p)
  int lbfgs_memory = 10;
  std::optional<Vec> initial_coeffs;  // default: zero field
  int num_threads = 1;

  void validate() const;
};

struct QqrSolution {
  DualField dual;
  PrimalTriple primal;
  SolveReport report;
};

// Minimizes the convex dual functional for F != 0 by preconditioned L-BFGS
// with a feasibility-backtracking Armijo line search: steps are halved until
// every quadrature kkt matrix keeps min eigenvalue >= cone_margin * min(a_x,
// a_p).  The F = 0 Galerkin matrix serves as the fixed initial
// inverse-Hessian, so the linear case converges in O(1) iterations.
QqrSolution minimize_dual(const QqrProblem& pb, const RitzBasis& basis,
                          const QqrSolveOptions& opts = {});

}  // namespace ocdual
