#include "ocdual/qqr.hpp"

#include <chrono>
#include <cmath>
#include <deque>

#include "ocdual/coercivity.hpp"
#include "ocdual/dtp.hpp"
#include "ocdual/functional.hpp"
#include "ocdual/lqr.hpp"

namespace ocdual {
namespace {

using Clock = std::chrono::steady_clock;

}  // namespace

void QqrSolveOptions::validate() const {
  if (max_iters < 1 || grad_tol <= 0.0 || cone_margin <= 0.0 ||
      sufficient_decrease <= 0.0 || backtrack_factor <= 0.0 ||
      backtrack_factor >= 1.0 || lbfgs_memory < 1) {
    throw std::invalid_argument("QqrSolveOptions: invalid parameters");
  }
}

QqrSolution minimize_dual(const QqrProblem& pb, const RitzBasis& basis,
                          const QqrSolveOptions& opts) {
  opts.validate();
  const int threads = opts.num_threads;
  const double a_min = std::min(pb.a_x, pb.a_p);
  const double margin_floor = opts.cone_margin * a_min;

  // F = 0 Galerkin matrix as the fixed initial inverse Hessian; exact for the
  // linear case, a near-exact preconditioner for small tensors.
  Mat precond = assemble_bilinear(pb.linearized(), basis, threads);
  precond.diagonal().array() += 1e-10 * (1.0 + precond.norm());
  Eigen::LLT<Mat> llt(precond);
  const bool use_precond = llt.info() == Eigen::Success;

  auto apply_h0 = [&](const Vec& q) -> Vec {
    return use_precond ? llt.solve(q) : q;
  };

  Vec coeffs = opts.initial_coeffs ? *opts.initial_coeffs
                                   : Vec::Zero(basis.num_free_dofs());
  DualField field = basis.field_from_coeffs(coeffs);
  if (min_cone_eigenvalue(pb, basis, field, threads) < margin_floor) {
    throw std::invalid_argument(
        "minimize_dual: initial field is not strictly feasible");
  }

  auto objective = [&](const DualField& f, bool* feasible) -> double {
    if (min_cone_eigenvalue(pb, basis, f, threads) < margin_floor) {
      *feasible = false;
      return 0.0;
    }
    FunctionalValue fv = eval_s_tilde(pb, basis, f, threads);
    *feasible = fv.finite;
    return fv.value;
  };

  bool feasible = true;
  double value = objective(field, &feasible);
  Vec grad = eval_gradient(pb, basis, field, threads);

  SolveReport rep;
  rep.solver = "qqr-lbfgs";
  rep.grid_elements = basis.grid().num_elements();
  rep.converged = false;

  std::deque<Vec> s_hist, y_hist;
  std::deque<double> rho_hist;
  bool stalled = false;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    rep.value_trace.push_back(value);
    rep.gradient_trace.push_back(grad.norm());
    if (grad.norm() <= opts.grad_tol * (1.0 + std::abs(value))) {
      rep.converged = true;
      break;
    }

    // Two-loop recursion.
    Vec q = grad;
    std::vector<double> alphas(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alphas[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alphas[i] * y_hist[i];
    }
    Vec r = apply_h0(q);
    for (size_t i = 0; i < s_hist.size(); ++i) {
      double beta = rho_hist[i] * y_hist[i].dot(r);
      r += (alphas[i] - beta) * s_hist[i];
    }
    Vec direction = -r;
    double slope = grad.dot(direction);
    if (slope >= 0.0) {  // fall back to preconditioned steepest descent
      direction = -apply_h0(grad);
      slope = grad.dot(direction);
    }

    double step = 1.0;
    double new_value = 0.0;
    Vec new_coeffs;
    DualField new_field;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      new_coeffs = coeffs + step * direction;
      new_field = basis.field_from_coeffs(new_coeffs);
      bool ok = true;
      new_value = objective(new_field, &ok);
      if (ok &&
          new_value <= value + opts.sufficient_decrease * step * slope) {
        accepted = true;
        break;
      }
      step *= opts.backtrack_factor;
    }
    if (!accepted) {
      stalled = true;
      break;
    }

    Vec new_grad = eval_gradient(pb, basis, new_field, threads);
    Vec s = new_coeffs - coeffs;
    Vec y = new_grad - grad;
    double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opts.lbfgs_memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    coeffs = new_coeffs;
    field = new_field;
    value = new_value;
    grad = new_grad;
  }
  if (it == opts.max_iters || stalled) {
    rep.value_trace.push_back(value);
    rep.gradient_trace.push_back(grad.norm());
  }

  QqrSolution sol;
  sol.dual = field;
  sol.primal = recover_primal(pb, sol.dual);
  rep.iterations = it;
  rep.functional_value = value;
  rep.finite = true;
  rep.gradient_norm = grad.norm();
  rep.primal_residuals = residual_primal(sol.primal, pb);
  try {
    CoercivityReport cr = check_invertibility(pb, basis.grid());
    rep.invert_margin_plus = cr.invert_margin_plus;
    rep.invert_margin_minus = cr.invert_margin_minus;
    rep.margin_warning =
        cr.invert_margin_plus < 1e-6 || cr.invert_margin_minus < 1e-6;
  } catch (const NotApplicableError&) {
  }
  sol.report = rep;
  return sol;
}

}  // namespace ocdual
