#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ocdual/coercivity.hpp"
#include "ocdual/io.hpp"
#include "ocdual/lqr.hpp"
#include "ocdual/oracles.hpp"
#include "ocdual/qqr.hpp"

namespace {

using namespace ocdual;

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitInputError = 2;
constexpr int kExitNotApplicable = 3;

struct CommonOpts {
  std::string problem_path;
  std::string out_dir = ".";
  int elements_override = 0;
  int threads = 1;
  double tol = 1e-8;
  unsigned seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts* o, bool needs_problem) {
  if (needs_problem) {
    cmd->add_option("--problem", o->problem_path, "problem JSON file")
        ->required();
  }
  cmd->add_option("--out", o->out_dir, "output directory");
  cmd->add_option("--elements", o->elements_override,
                  "override the grid element count");
  cmd->add_option("--threads", o->threads, "element-parallel worker count");
  cmd->add_option("--tol", o->tol, "solver / comparison tolerance");
  cmd->add_option("--seed", o->seed, "seed for randomized workflows");
}

TimeGrid make_grid(const QqrProblem& pb, const CommonOpts& o) {
  if (o.elements_override > 0) {
    return TimeGrid::uniform(pb.T, o.elements_override);
  }
  if (pb.grid_nodes) return TimeGrid::from_nodes(*pb.grid_nodes);
  return TimeGrid::uniform(pb.T, pb.grid_elements);
}

void ensure_out(const CommonOpts& o) {
  std::filesystem::create_directories(o.out_dir);
}

std::string out_path(const CommonOpts& o, const std::string& name) {
  return (std::filesystem::path(o.out_dir) / name).string();
}

void print_margins(const SolveReport& rep) {
  if (rep.invert_margin_plus) {
    std::printf("coercivity margins: plus=%.3e minus=%.3e%s\n",
                *rep.invert_margin_plus, *rep.invert_margin_minus,
                rep.margin_warning ? "  [warning: near-singular]" : "");
  } else {
    std::printf("coercivity margins: not applicable (C condition fails)\n");
  }
}

int cmd_solve_lqr(const CommonOpts& o) {
  QqrProblem pb = load_problem(o.problem_path);
  RitzBasis basis(make_grid(pb, o), pb);
  LqrSolution sol = solve_lqr(pb, basis, o.threads);
  ensure_out(o);
  write_trajectory_csv(out_path(o, "trajectory.csv"), sol.primal);
  write_text_file(out_path(o, "report.json"), report_to_json(sol.report));
  std::printf("solve-lqr: value=%.12g gradient=%.3e rank=%d/%d\n",
              sol.report.functional_value, sol.report.gradient_norm,
              sol.report.rank,
              sol.report.rank + sol.report.truncated_singular_values);
  print_margins(sol.report);
  return kExitOk;
}

int cmd_solve_qqr(const CommonOpts& o) {
  QqrProblem pb = load_problem(o.problem_path);
  RitzBasis basis(make_grid(pb, o), pb);
  QqrSolveOptions opts;
  opts.grad_tol = o.tol;
  opts.num_threads = o.threads;
  QqrSolution sol = minimize_dual(pb, basis, opts);
  ensure_out(o);
  write_trajectory_csv(out_path(o, "trajectory.csv"), sol.primal);
  write_text_file(out_path(o, "report.json"), report_to_json(sol.report));
  std::printf("solve-qqr: value=%.12g gradient=%.3e iterations=%d%s\n",
              sol.report.functional_value, sol.report.gradient_norm,
              sol.report.iterations,
              sol.report.converged ? "" : "  [not converged]");
  print_margins(sol.report);
  return sol.report.converged ? kExitOk : kExitNotConverged;
}

int cmd_riccati(const CommonOpts& o) {
  QqrProblem pb = load_problem(o.problem_path);
  TimeGrid grid = make_grid(pb, o);
  RiccatiSolution sol = solve_riccati(pb, grid);
  ensure_out(o);
  write_trajectory_csv(out_path(o, "trajectory.csv"), sol.trajectory);
  std::printf("riccati: K(0) norm=%.12g, %zu stored K samples\n",
              sol.k_matrices.front().norm(), sol.k_matrices.size());
  return kExitOk;
}

int cmd_shoot(const CommonOpts& o) {
  QqrProblem pb = load_problem(o.problem_path);
  TimeGrid grid = make_grid(pb, o);
  ShootingResult res = solve_shooting(pb, grid);
  ensure_out(o);
  write_trajectory_csv(out_path(o, "trajectory.csv"), res.trajectory);
  std::printf("shoot: terminal residual=%.3e after %d Newton iterations%s\n",
              res.terminal_residual, res.newton_iterations,
              res.converged ? "" : "  [not converged]");
  return res.converged ? kExitOk : kExitNotConverged;
}

int cmd_example(const CommonOpts& o, double T, double x0, double lambda0) {
  int elements = o.elements_override > 0 ? o.elements_override : 100;
  TimeGrid grid = TimeGrid::uniform(T, elements);
  ensure_out(o);
  write_trajectory_csv(out_path(o, "trajectory.csv"),
                       example_primal(x0, T, grid));
  // Dual fields on the same sample set, in the example's own orientation.
  std::vector<double> ts = sample_times(grid);
  std::string dual = "t,gamma,lambda,mu\n";
  char buf[160];
  for (double t : ts) {
    ExamplePoint pt = example_solution(x0, lambda0, T, t);
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", t, pt.gamma,
                  pt.lambda, pt.mu);
    dual += buf;
  }
  write_text_file(out_path(o, "example_dual.csv"), dual);
  std::printf("example: wrote closed-form trajectories for T=%g x0=%g\n", T,
              x0);
  return kExitOk;
}

int cmd_check(const CommonOpts& o) {
  QqrProblem pb = load_problem(o.problem_path);
  TimeGrid grid = make_grid(pb, o);
  CoercivityReport rep = check_invertibility(pb, grid);
  ensure_out(o);
  write_text_file(out_path(o, "coercivity.json"), coercivity_to_json(rep));
  std::printf("check: margin_plus=%.6e margin_minus=%.6e data_size=%.6e\n",
              rep.invert_margin_plus, rep.invert_margin_minus, rep.data_size);
  if (rep.invert_margin_plus < 1e-6 || rep.invert_margin_minus < 1e-6) {
    std::printf("warning: invertibility margin near zero; the coercivity "
                "argument does not apply at this horizon\n");
  }
  return kExitOk;
}

int cmd_compare(const CommonOpts& o, const std::string& file_a,
                const std::string& file_b, const std::string& metric) {
  PrimalTriple a = read_trajectory_csv(file_a);
  PrimalTriple b = read_trajectory_csv(file_b);
  if (a.size() != b.size() || a.x.cols() != b.x.cols() ||
      a.u.cols() != b.u.cols()) {
    throw std::runtime_error("compare: trajectory shapes differ");
  }
  for (int i = 0; i < a.size(); ++i) {
    if (std::abs(a.t[i] - b.t[i]) > 1e-9) {
      throw std::runtime_error("compare: sample times differ");
    }
  }
  auto block_stats = [&](const Mat& ma, const Mat& mb, const char* name,
                         std::string* csv, double* worst) {
    Mat diff = ma - mb;
    double max_abs = diff.size() ? diff.cwiseAbs().maxCoeff() : 0.0;
    double l2 = 0.0, ref = 0.0;
    for (int i = 0; i + 1 < a.size(); ++i) {
      double h = a.t[i + 1] - a.t[i];
      l2 += 0.5 * h * (diff.row(i).squaredNorm() + diff.row(i + 1).squaredNorm());
      ref += 0.5 * h * (mb.row(i).squaredNorm() + mb.row(i + 1).squaredNorm());
    }
    l2 = std::sqrt(l2);
    double rel = l2 / (std::sqrt(ref) + 1e-300);
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g\n", name, max_abs,
                  l2, rel);
    *csv += buf;
    std::printf("%-2s  max-abs %.6e   L2 %.6e   rel-L2 %.6e\n", name, max_abs,
                l2, rel);
    *worst = std::max(*worst, metric == "rel-l2" ? rel : max_abs);
  };
  std::string csv = "quantity,max_abs,l2,rel_l2\n";
  double worst = 0.0;
  block_stats(a.x, b.x, "x", &csv, &worst);
  block_stats(a.u, b.u, "u", &csv, &worst);
  block_stats(a.p, b.p, "p", &csv, &worst);
  ensure_out(o);
  write_text_file(out_path(o, "compare.csv"), csv);
  if (worst > o.tol) {
    std::printf("compare: %s difference %.6e exceeds tolerance %.6e\n",
                metric.c_str(), worst, o.tol);
    return kExitNotConverged;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex-dual solver for forced LQR and QQR optimal control"};
  app.require_subcommand(1);

  CommonOpts lqr_o, qqr_o, ric_o, shoot_o, ex_o, check_o, cmp_o;
  double ex_T = 1.0, ex_x0 = 1.0, ex_lambda0 = 0.0;
  std::string cmp_a, cmp_b, cmp_metric = "max-abs";

  add_common(app.add_subcommand("solve-lqr", "direct dual solve, F = 0"),
             &lqr_o, true);
  add_common(app.add_subcommand("solve-qqr", "convex dual minimization"),
             &qqr_o, true);
  add_common(app.add_subcommand("riccati", "classical feedback baseline"),
             &ric_o, true);
  add_common(app.add_subcommand("shoot", "two-point BVP shooting baseline"),
             &shoot_o, true);
  CLI::App* ex = app.add_subcommand("example", "closed-form example solution");
  add_common(ex, &ex_o, false);
  ex->add_option("--T", ex_T, "horizon");
  ex->add_option("--x0", ex_x0, "example x0 parameter (initial state is -x0)");
  ex->add_option("--lambda0", ex_lambda0, "dual anchor");
  add_common(app.add_subcommand("check", "coercivity diagnostics"), &check_o,
             true);
  CLI::App* cmp = app.add_subcommand("compare", "diff two trajectory files");
  add_common(cmp, &cmp_o, false);
  cmp->add_option("--a", cmp_a, "first trajectory CSV")->required();
  cmp->add_option("--b", cmp_b, "second trajectory CSV")->required();
  cmp->add_option("--metric", cmp_metric, "threshold metric: max-abs | rel-l2");
  cmp_o.tol = 1e-12;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  try {
    if (app.got_subcommand("solve-lqr")) return cmd_solve_lqr(lqr_o);
    if (app.got_subcommand("solve-qqr")) return cmd_solve_qqr(qqr_o);
    if (app.got_subcommand("riccati")) return cmd_riccati(ric_o);
    if (app.got_subcommand("shoot")) return cmd_shoot(shoot_o);
    if (app.got_subcommand("example"))
      return cmd_example(ex_o, ex_T, ex_x0, ex_lambda0);
    if (app.got_subcommand("check")) return cmd_check(check_o);
    if (app.got_subcommand("compare"))
      return cmd_compare(cmp_o, cmp_a, cmp_b, cmp_metric);
  } catch (const NotApplicableError& e) {
    std::fprintf(stderr, "not applicable: %s\n", e.what());
    return kExitNotApplicable;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInputError;
  }
  return kExitInputError;
}
