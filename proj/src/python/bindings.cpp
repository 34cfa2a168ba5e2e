#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ocdual/coercivity.hpp"
#include "ocdual/functional.hpp"
#include "ocdual/io.hpp"
#include "ocdual/lqr.hpp"
#include "ocdual/oracles.hpp"
#include "ocdual/qqr.hpp"

namespace py = pybind11;
using namespace ocdual;

namespace {

TimeGrid grid_for(const QqrProblem& pb, int elements) {
  if (elements > 0) return TimeGrid::uniform(pb.T, elements);
  if (pb.grid_nodes) return TimeGrid::from_nodes(*pb.grid_nodes);
  return TimeGrid::uniform(pb.T, pb.grid_elements);
}

py::dict triple_dict(const PrimalTriple& tr) {
  py::dict d;
  d["t"] = tr.t;
  d["x"] = tr.x;
  d["u"] = tr.u;
  d["p"] = tr.p;
  return d;
}

py::dict report_dict(const SolveReport& rep) {
  py::dict d;
  d["solver"] = rep.solver;
  d["value"] = rep.functional_value;
  d["finite"] = rep.finite;
  d["gradient_norm"] = rep.gradient_norm;
  d["iterations"] = rep.iterations;
  d["converged"] = rep.converged;
  d["rank"] = rep.rank;
  d["residual_max"] = rep.primal_residuals.max_norm();
  if (rep.invert_margin_plus) {
    d["invert_margin_plus"] = *rep.invert_margin_plus;
    d["invert_margin_minus"] = *rep.invert_margin_minus;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_ocdual, mod) {
  mod.doc() = "Convex-dual solver for forced LQR and QQR optimal control";

  py::register_exception<NotApplicableError>(mod, "NotApplicableError");

  py::class_<QqrProblem>(mod, "Problem")
      .def_readonly("n", &QqrProblem::n)
      .def_readonly("m", &QqrProblem::m)
      .def_readonly("T", &QqrProblem::T)
      .def_readonly("B", &QqrProblem::B)
      .def_readonly("C", &QqrProblem::C)
      .def_readonly("G", &QqrProblem::G)
      .def_readonly("M", &QqrProblem::M)
      .def_readonly("N", &QqrProblem::N)
      .def_readonly("x0", &QqrProblem::x0)
      .def_readonly("lambda0", &QqrProblem::lambda0)
      .def("is_lqr", &QqrProblem::is_lqr)
      .def("to_json", &problem_to_json);

  mod.def("parse_problem", &parse_problem, py::arg("json_text"));
  mod.def("load_problem", &load_problem, py::arg("path"));
  mod.def("example_problem", &make_example_problem, py::arg("x0"),
          py::arg("lambda0"), py::arg("T"), py::arg("elements"));

  mod.def(
      "solve_lqr",
      [](const QqrProblem& pb, int elements) {
        RitzBasis basis(grid_for(pb, elements), pb);
        LqrSolution sol = solve_lqr(pb, basis);
        py::dict d = triple_dict(sol.primal);
        d["report"] = report_dict(sol.report);
        return d;
      },
      py::arg("problem"), py::arg("elements") = 0);

  mod.def(
      "solve_qqr",
      [](const QqrProblem& pb, int elements, double grad_tol, int max_iters) {
        RitzBasis basis(grid_for(pb, elements), pb);
        QqrSolveOptions opts;
        opts.grad_tol = grad_tol;
        opts.max_iters = max_iters;
        QqrSolution sol = minimize_dual(pb, basis, opts);
        py::dict d = triple_dict(sol.primal);
        d["report"] = report_dict(sol.report);
        return d;
      },
      py::arg("problem"), py::arg("elements") = 0, py::arg("grad_tol") = 1e-8,
      py::arg("max_iters") = 500);

  mod.def(
      "solve_riccati",
      [](const QqrProblem& pb, int elements) {
        RiccatiSolution sol = solve_riccati(pb, grid_for(pb, elements));
        return triple_dict(sol.trajectory);
      },
      py::arg("problem"), py::arg("elements") = 0);

  mod.def(
      "solve_shooting",
      [](const QqrProblem& pb, int elements) {
        ShootingResult res = solve_shooting(pb, grid_for(pb, elements));
        py::dict d = triple_dict(res.trajectory);
        d["converged"] = res.converged;
        d["terminal_residual"] = res.terminal_residual;
        return d;
      },
      py::arg("problem"), py::arg("elements") = 0);

  mod.def(
      "example_solution",
      [](double x0, double lambda0, double T, double t) {
        ExamplePoint pt = example_solution(x0, lambda0, T, t);
        py::dict d;
        d["x"] = pt.x;
        d["u"] = pt.u;
        d["p"] = pt.p;
        d["gamma"] = pt.gamma;
        d["lambda"] = pt.lambda;
        d["mu"] = pt.mu;
        return d;
      },
      py::arg("x0"), py::arg("lambda0"), py::arg("T"), py::arg("t"));

  mod.def(
      "check_invertibility",
      [](const QqrProblem& pb, int elements) {
        CoercivityReport rep =
            check_invertibility(pb, grid_for(pb, elements));
        py::dict d;
        d["R"] = rep.R;
        d["exp_TR"] = rep.exp_TR;
        d["invert_margin_plus"] = rep.invert_margin_plus;
        d["invert_margin_minus"] = rep.invert_margin_minus;
        d["data_size"] = rep.data_size;
        d["c_applicable"] = rep.c_applicable;
        return d;
      },
      py::arg("problem"), py::arg("elements") = 0);

  mod.def("matrix_exponential", &matrix_exponential, py::arg("A"),
          py::arg("t"));
  mod.def("primal_uniqueness_check", &primal_uniqueness_check, py::arg("T"));
  mod.def(
      "g_lower_bound",
      [](const QqrProblem& pb, const Vec& gamma, const Vec& alpha,
         const Vec& lambda, const Vec& beta, const Vec& mu) {
        return g_lower_bound(gamma, alpha, lambda, beta, mu, pb);
      },
      py::arg("problem"), py::arg("gamma"), py::arg("alpha"),
      py::arg("lambda"), py::arg("beta"), py::arg("mu"));
}
