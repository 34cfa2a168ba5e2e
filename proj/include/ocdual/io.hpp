#pragma once

#include <string>

#include "ocdual/common.hpp"
#include "ocdual/coercivity.hpp"
#include "ocdual/problem.hpp"
#include "ocdual/report.hpp"
#include "ocdual/trajectory.hpp"

namespace ocdual {

// Problem files: JSON with n, m, T, dense row-major B, C, G, M, N, flat F in
// (i, r, s) order, signals as "zero" | constant array | table rows, x0,
// lambda0, weights, base, grid ({"elements": K} or {"nodes": [...]}).
QqrProblem load_problem(const std::string& path);
QqrProblem parse_problem(const std::string& json_text);
std::string problem_to_json(const QqrProblem& pb);

// Trajectory files: CSV with header t, x_1.., u_1.., p_1..; fixed 17
// significant digits so identical runs are byte-identical.
void write_trajectory_csv(const std::string& path, const PrimalTriple& triple);
PrimalTriple read_trajectory_csv(const std::string& path);

std::string report_to_json(const SolveReport& report);
std::string coercivity_to_json(const CoercivityReport& report);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace ocdual
