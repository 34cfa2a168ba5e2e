#include "ocdual/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ocdual/dtp.hpp"

namespace ocdual {
namespace {

// Second-order nodal derivative estimates for a piecewise-linear field:
// average of adjacent slopes in the interior (central difference), one-sided
// three-node stencils at the ends.
Vec nodal_slope(const Mat& nodal, const TimeGrid& grid, int j) {
  const int K = grid.num_elements();
  if (K == 1) {
    return (nodal.row(1) - nodal.row(0)).transpose() / grid.element_length(0);
  }
  if (j == 0) {
    double h0 = grid.element_length(0), h1 = grid.element_length(1);
    Vec s0 = (nodal.row(1) - nodal.row(0)).transpose() / h0;
    Vec s1 = (nodal.row(2) - nodal.row(1)).transpose() / h1;
    return s0 + (s0 - s1) * h0 / (h0 + h1);
  }
  if (j == K) {
    double h0 = grid.element_length(K - 1), h1 = grid.element_length(K - 2);
    Vec s0 = (nodal.row(K) - nodal.row(K - 1)).transpose() / h0;
    Vec s1 = (nodal.row(K - 1) - nodal.row(K - 2)).transpose() / h1;
    return s0 + (s0 - s1) * h0 / (h0 + h1);
  }
  double hl = grid.element_length(j - 1), hr = grid.element_length(j);
  Vec sl = (nodal.row(j) - nodal.row(j - 1)).transpose() / hl;
  Vec sr = (nodal.row(j + 1) - nodal.row(j)).transpose() / hr;
  return (hr * sl + hl * sr) / (hl + hr);
}

// Second-order nodal estimate of the element-wise constant mu.
Vec nodal_mu(const Mat& mu, const TimeGrid& grid, int j) {
  const int K = grid.num_elements();
  if (K == 1) return mu.row(0).transpose();
  if (j == 0) return (1.5 * mu.row(0) - 0.5 * mu.row(1)).transpose();
  if (j == K) return (1.5 * mu.row(K - 1) - 0.5 * mu.row(K - 2)).transpose();
  return (0.5 * (mu.row(j - 1) + mu.row(j))).transpose();
}

}  // namespace

std::vector<double> sample_times(const TimeGrid& grid) {
  std::vector<double> out;
  out.reserve(2 * grid.num_elements() + 1);
  for (int e = 0; e < grid.num_elements(); ++e) {
    out.push_back(grid.node(e));
    out.push_back(grid.element_midpoint(e));
  }
  out.push_back(grid.final_time());
  return out;
}

PrimalTriple recover_primal(const QqrProblem& pb, const DualField& d) {
  const TimeGrid& grid = d.grid;
  const int K = grid.num_elements();
  std::vector<double> ts = sample_times(grid);
  PrimalTriple out;
  out.t = ts;
  out.x = Mat::Zero(ts.size(), pb.n);
  out.u = Mat::Zero(ts.size(), pb.m);
  out.p = Mat::Zero(ts.size(), pb.n);

  auto emit = [&](int row, double t, const Vec& gamma, const Vec& gdot,
                  const Vec& lambda, const Vec& ldot, const Vec& mu) {
    auto im = intermediates_from_values(pb, gamma, gdot, lambda, ldot, mu, t);
    DtpPoint pt = dtp_map(pb, im, t);
    if (!pt.feasible) {
      throw std::domain_error("recover_primal: infeasible sample point");
    }
    out.x.row(row) = pt.x.transpose();
    out.u.row(row) = pt.u.transpose();
    out.p.row(row) = pt.p.transpose();
  };

  int row = 0;
  for (int e = 0; e <= K; ++e) {
    emit(row++, grid.node(e), d.gamma.row(e).transpose(),
         nodal_slope(d.gamma, grid, e), d.lambda.row(e).transpose(),
         nodal_slope(d.lambda, grid, e), nodal_mu(d.mu, grid, e));
    if (e < K) {
      double tm = grid.element_midpoint(e);
      emit(row++, tm, d.gamma_at(tm), d.gamma_slope(e), d.lambda_at(tm),
           d.lambda_slope(e), d.mu.row(e).transpose());
    }
  }
  return out;
}

double ResidualReport::max_norm() const {
  return std::max({state_max, costate_max, control_max, terminal, initial});
}

ResidualReport residual_primal(const PrimalTriple& primal,
                               const QqrProblem& pb) {
  const int len = primal.size();
  if (len < 3) {
    throw std::invalid_argument("residual_primal: need at least 3 samples");
  }

  auto derivative = [&](const Mat& vals, const std::optional<Mat>& analytic,
                        int i) -> Vec {
    if (analytic) return analytic->row(i).transpose();
    const auto& t = primal.t;
    if (i == 0) {
      double h0 = t[1] - t[0], h1 = t[2] - t[1];
      Vec s0 = (vals.row(1) - vals.row(0)).transpose() / h0;
      Vec s1 = (vals.row(2) - vals.row(1)).transpose() / h1;
      return s0 + (s0 - s1) * h0 / (h0 + h1);
    }
    if (i == len - 1) {
      double h0 = t[len - 1] - t[len - 2], h1 = t[len - 2] - t[len - 3];
      Vec s0 = (vals.row(len - 1) - vals.row(len - 2)).transpose() / h0;
      Vec s1 = (vals.row(len - 2) - vals.row(len - 3)).transpose() / h1;
      return s0 + (s0 - s1) * h0 / (h0 + h1);
    }
    double hl = t[i] - t[i - 1], hr = t[i + 1] - t[i];
    Vec sl = (vals.row(i) - vals.row(i - 1)).transpose() / hl;
    Vec sr = (vals.row(i + 1) - vals.row(i)).transpose() / hr;
    return (hr * sl + hl * sr) / (hl + hr);
  };

  ResidualReport rep;
  double state_sq = 0.0, costate_sq = 0.0, control_sq = 0.0;
  std::vector<double> wtrap(len, 0.0);
  for (int i = 0; i + 1 < len; ++i) {
    double h = primal.t[i + 1] - primal.t[i];
    wtrap[i] += 0.5 * h;
    wtrap[i + 1] += 0.5 * h;
  }
  for (int i = 0; i < len; ++i) {
    double t = primal.t[i];
    Vec x = primal.x.row(i).transpose();
    Vec u = primal.u.row(i).transpose();
    Vec p = primal.p.row(i).transpose();
    Vec ex = derivative(primal.x, primal.x_dot, i) - pb.dynamics_rhs(t, x, u);
    Vec ep = derivative(primal.p, primal.p_dot, i) - pb.B * x +
             pb.M.transpose() * p;
    if (!pb.F.empty()) ep += pb.costate_coupling(p, x);
    Vec eu = pb.N.transpose() * p - pb.C * u;
    rep.state_max = std::max(rep.state_max, ex.lpNorm<Eigen::Infinity>());
    rep.costate_max = std::max(rep.costate_max, ep.lpNorm<Eigen::Infinity>());
    rep.control_max = std::max(rep.control_max, eu.lpNorm<Eigen::Infinity>());
    state_sq += wtrap[i] * ex.squaredNorm();
    costate_sq += wtrap[i] * ep.squaredNorm();
    control_sq += wtrap[i] * eu.squaredNorm();
  }
  rep.state_l2 = std::sqrt(state_sq);
  rep.costate_l2 = std::sqrt(costate_sq);
  rep.control_l2 = std::sqrt(control_sq);
  rep.terminal = (primal.p.row(len - 1).transpose() +
                  pb.G * primal.x.row(len - 1).transpose())
                     .norm();
  rep.initial = (primal.x.row(0).transpose() - pb.x0).norm();
  return rep;
}

BaseState base_from_trajectory(const QqrProblem& pb,
                               const PrimalTriple& primal) {
  BaseState base;
  if (primal.x_dot && primal.p_dot) {
    base.x = VectorSignal::hermite_table(primal.t, primal.x, *primal.x_dot);
    base.p = VectorSignal::hermite_table(primal.t, primal.p, *primal.p_dot);
    // u follows p through the stationarity relation, so u̇ = C⁺Nᵀṗ.
    Eigen::SelfAdjointEigenSolver<Mat> es(pb.C);
    double thresh = 1e-12 * es.eigenvalues().cwiseAbs().maxCoeff();
    Mat c_pinv = Mat::Zero(pb.m, pb.m);
    for (int i = 0; i < pb.m; ++i) {
      if (std::abs(es.eigenvalues()[i]) > thresh) {
        c_pinv += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose() /
                  es.eigenvalues()[i];
      }
    }
    Mat u_dot = *primal.p_dot * (c_pinv * pb.N.transpose()).transpose();
    base.u = VectorSignal::hermite_table(primal.t, primal.u, u_dot);
  } else {
    base.x = VectorSignal::table(primal.t, primal.x);
    base.u = VectorSignal::table(primal.t, primal.u);
    base.p = VectorSignal::table(primal.t, primal.p);
  }
  return base;
}

}  // namespace ocdual
