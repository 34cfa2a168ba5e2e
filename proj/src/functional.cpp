#include "ocdual/functional.hpp"

#include <cmath>
#include <stdexcept>

namespace ocdual {
namespace {

struct ElementValue {
  double integral = 0.0;
  bool finite = true;
};

struct ElementGradient {
  // Contributions to the element's two gamma/lambda nodes and its mu row.
  Vec gamma_left, gamma_right, lambda_left, lambda_right, mu;
  bool ok = true;
};

}  // namespace

DensityValue density_from_intermediates(const QqrProblem& pb,
                                        const DualIntermediates& im,
                                        const Vec& gamma_value, double t) {
  if (classify_feasibility(im.kkt, im.rhs) != Feasibility::kPsdInImage) {
    return {0.0, false};
  }
  SymmetricPinv pinv(im.kkt);
  double value = 0.5 * (pinv.quadratic_form(im.rhs) +
                        im.script_u.squaredNorm() / pb.a_u);
  if (!pb.base.is_zero()) {
    value -= pb.base.x(t).dot(im.script_x + 0.5 * im.bar_x);
    value -= pb.base.p(t).dot(im.script_p + 0.5 * im.bar_p);
    value -= pb.base.u(t).dot(im.script_u);
  }
  if (!pb.A.is_zero()) {
    value -= pb.A(t).dot(gamma_value);
  }
  return {value, true};
}

DensityValue dual_density(const QqrProblem& pb, const DualField& d, double t) {
  return density_from_intermediates(pb, compute_intermediates(pb, d, t),
                                    d.gamma_at(t), t);
}

FunctionalValue eval_s_tilde(const QqrProblem& pb, const RitzBasis& basis,
                             const DualField& d, int num_threads) {
  const TimeGrid& grid = basis.grid();
  std::vector<ElementValue> pieces(grid.num_elements());
  quadrature_map_reduce<int>(
      grid, num_threads,
      [&](int e) {
        ElementValue ev;
        Vec gdot = d.gamma_slope(e);
        Vec ldot = d.lambda_slope(e);
        Vec mu = d.mu.row(e).transpose();
        for (int q = 0; q < TimeGrid::kQuadOrder; ++q) {
          double t = grid.quad_point(e, q);
          auto im = intermediates_from_values(pb, d.gamma_at(t), gdot,
                                              d.lambda_at(t), ldot, mu, t);
          DensityValue dv =
              density_from_intermediates(pb, im, d.gamma_at(t), t);
          if (!dv.finite) {
            ev.finite = false;
            break;
          }
          ev.integral += grid.quad_weight(e, q) * dv.value;
        }
        pieces[e] = ev;
        return 0;
      },
      0, [](int, int) { return 0; });

  FunctionalValue out;
  out.element_density.resize(grid.num_elements());
  double integral = 0.0;
  for (int e = 0; e < grid.num_elements(); ++e) {
    if (!pieces[e].finite) return FunctionalValue::infinite();
    out.element_density[e] = pieces[e].integral;
    integral += pieces[e].integral;
  }
  out.finite = true;
  out.value = integral - d.gamma.row(0).dot(pb.x0);
  return out;
}

Vec eval_gradient(const QqrProblem& pb, const RitzBasis& basis,
                  const DualField& d, int num_threads) {
  const TimeGrid& grid = basis.grid();
  const int K = grid.num_elements();
  const int n = pb.n;
  const int m = pb.m;

  std::vector<ElementGradient> pieces(K);
  bool all_ok = quadrature_map_reduce<bool>(
      grid, num_threads,
      [&](int e) {
        ElementGradient eg;
        eg.gamma_left = Vec::Zero(n);
        eg.gamma_right = Vec::Zero(n);
        eg.lambda_left = Vec::Zero(n);
        eg.lambda_right = Vec::Zero(n);
        eg.mu = Vec::Zero(m);
        double h = grid.element_length(e);
        Vec gdot = d.gamma_slope(e);
        Vec ldot = d.lambda_slope(e);
        Vec mu = d.mu.row(e).transpose();
        for (int q = 0; q < TimeGrid::kQuadOrder; ++q) {
          double t = grid.quad_point(e, q);
          double w = grid.quad_weight(e, q);
          auto im = intermediates_from_values(pb, d.gamma_at(t), gdot,
                                              d.lambda_at(t), ldot, mu, t);
          SymmetricPinv pinv(im.kkt);
          // Strict interior of the cone only.
          if (pinv.min_eigenvalue() <= kPsdTol * pinv.spectral_norm()) {
            eg.ok = false;
            pieces[e] = eg;
            return false;
          }
          DtpPoint pt = dtp_map(pb, im, t);
          if (!pt.feasible) {
            eg.ok = false;
            pieces[e] = eg;
            return false;
          }
          // d(density)/d(dual values), inner maximizer held fixed:
          //   d/dγ̇ = -x,  d/dγ = -(A + Mx + Nu + ½xFx),
          //   d/dλ̇ = -p,  d/dλ = -Bx + Mᵀp + pF·x,
          //   d/dμ  = Nᵀp - Cu.
          Vec dgamma = -(pb.A(t) + pb.M * pt.x + pb.N * pt.u);
          if (!pb.F.empty()) dgamma -= 0.5 * pb.quadratic_dynamics(pt.x);
          Vec dlambda = -pb.B * pt.x + pb.M.transpose() * pt.p;
          if (!pb.F.empty()) dlambda += pb.costate_coupling(pt.p, pt.x);
          Vec dmu = pb.N.transpose() * pt.p - pb.C * pt.u;

          double vl = (grid.node(e + 1) - t) / h;
          double vr = (t - grid.node(e)) / h;
          double sl = -1.0 / h, sr = 1.0 / h;
          eg.gamma_left += w * (sl * (-pt.x) + vl * dgamma);
          eg.gamma_right += w * (sr * (-pt.x) + vr * dgamma);
          eg.lambda_left += w * (sl * (-pt.p) + vl * dlambda);
          eg.lambda_right += w * (sr * (-pt.p) + vr * dlambda);
          eg.mu += w * dmu;
        }
        pieces[e] = eg;
        return true;
      },
      true, [](bool a, bool b) { return a && b; });

  if (!all_ok) {
    throw std::domain_error(
        "eval_gradient: dual field at or outside the feasibility cone");
  }

  Mat grad_gamma = Mat::Zero(K + 1, n);
  Mat grad_lambda = Mat::Zero(K + 1, n);
  Mat grad_mu = Mat::Zero(K, m);
  for (int e = 0; e < K; ++e) {
    grad_gamma.row(e) += pieces[e].gamma_left.transpose();
    grad_gamma.row(e + 1) += pieces[e].gamma_right.transpose();
    grad_lambda.row(e) += pieces[e].lambda_left.transpose();
    grad_lambda.row(e + 1) += pieces[e].lambda_right.transpose();
    grad_mu.row(e) = pieces[e].mu.transpose();
  }
  grad_gamma.row(0) -= pb.x0.transpose();
  return basis.fold_full_gradient(grad_gamma, grad_lambda, grad_mu);
}

double g_lower_bound(const Vec& gamma, const Vec& alpha, const Vec& lambda,
                     const Vec& beta, const Vec& mu, const QqrProblem& pb) {
  Vec sx = alpha + pb.M.transpose() * gamma + pb.B.transpose() * lambda;
  Vec sp = beta - pb.M * lambda - pb.N * mu;
  Vec su = pb.N.transpose() * gamma + pb.C * mu;
  double fnorm = pb.tensor_norm();
  double dx = pb.a_x + fnorm * (gamma.norm() + lambda.norm());
  double dp = pb.a_p + fnorm * lambda.norm();
  return sx.squaredNorm() / (2.0 * dx) + sp.squaredNorm() / (2.0 * dp) +
         su.squaredNorm() / (2.0 * pb.a_u);
}

double lower_bound_certificate(const QqrProblem& pb,
                               const PrimalTriple& primal) {
  const int len = primal.size();
  if (len < 3) {
    throw std::invalid_argument("lower_bound_certificate: too few samples");
  }
  std::vector<double> f(len);
  for (int i = 0; i < len; ++i) {
    f[i] = 0.5 * (pb.a_x * primal.x.row(i).squaredNorm() +
                  pb.a_u * primal.u.row(i).squaredNorm() +
                  pb.a_p * primal.p.row(i).squaredNorm());
  }
  double h = primal.t[1] - primal.t[0];
  bool uniform = true;
  for (int i = 1; i + 1 < len; ++i) {
    if (std::abs(primal.t[i + 1] - primal.t[i] - h) > 1e-12 * (1.0 + h)) {
      uniform = false;
      break;
    }
  }
  double integral = 0.0;
  if (uniform && len % 2 == 1) {
    for (int i = 0; i + 2 < len; i += 2) {
      integral += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    }
  } else {
    for (int i = 0; i + 1 < len; ++i) {
      integral += 0.5 * (primal.t[i + 1] - primal.t[i]) * (f[i] + f[i + 1]);
    }
  }
  return -integral;
}

double min_cone_eigenvalue(const QqrProblem& pb, const RitzBasis& basis,
                           const DualField& d, int num_threads) {
  if (pb.is_lqr()) return std::min(pb.a_x, pb.a_p);
  const TimeGrid& grid = basis.grid();
  return quadrature_map_reduce<double>(
      grid, num_threads,
      [&](int e) {
        double lo = std::numeric_limits<double>::infinity();
        for (int q = 0; q < TimeGrid::kQuadOrder; ++q) {
          double t = grid.quad_point(e, q);
          Mat kkt = assemble_kkt(pb, d.gamma_at(t), d.lambda_at(t));
          Eigen::SelfAdjointEigenSolver<Mat> es(kkt);
          lo = std::min(lo, es.eigenvalues().minCoeff());
        }
        return lo;
      },
      std::numeric_limits<double>::infinity(),
      [](double a, double b) { return std::min(a, b); });
}

double lagrangian_density(const QqrProblem& pb, const DualIntermediates& im,
                          const Vec& gamma_value, double t, const Vec& x,
                          const Vec& u, const Vec& p) {
  Vec dx = x - pb.base.x(t);
  Vec du = u - pb.base.u(t);
  Vec dp = p - pb.base.p(t);
  Vec ustar(2 * pb.n);
  ustar.head(pb.n) = dx;
  ustar.tail(pb.n) = dp;
  double value = -0.5 * ustar.dot(im.kkt * ustar) -
                 0.5 * pb.a_u * du.squaredNorm() - ustar.dot(im.rhs) -
                 du.dot(im.script_u);
  value -= pb.base.x(t).dot(im.script_x + 0.5 * im.bar_x);
  value -= pb.base.p(t).dot(im.script_p + 0.5 * im.bar_p);
  value -= pb.base.u(t).dot(im.script_u);
  value -= pb.A(t).dot(gamma_value);
  return value;
}

}  // namespace ocdual
