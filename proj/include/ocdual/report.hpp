#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ocdual/common.hpp"
#include "ocdual/trajectory.hpp"

namespace ocdual {

// Everything a solve emits besides the trajectories.
struct SolveReport {
  std::string solver;
  int grid_elements = 0;
  double functional_value = 0.0;
  bool finite = true;

  double gradient_norm = 0.0;
  ResidualReport primal_residuals;

  // Linear solve diagnostics (solve_lqr).
  double system_residual = 0.0;
  int rank = 0;
  int truncated_singular_values = 0;
  double sv_max = 0.0, sv_min_kept = 0.0;

  // Iteration diagnostics (minimize_dual).
  int iterations = 0;
  bool converged = true;
  std::vector<double> value_trace;
  std::vector<double> gradient_trace;

  // Coercivity margins, logged on every solve path when computable.
  std::optional<double> invert_margin_plus;
  std::optional<double> invert_margin_minus;
  bool margin_warning = false;  // either margin < 1e-6

  double assembly_seconds = 0.0;
  double factorization_seconds = 0.0;
  double solve_seconds = 0.0;
};

}  // namespace ocdual
