#include "ocdual/dual_field.hpp"

#include <stdexcept>

namespace ocdual {
namespace {

Vec interp_row(const Mat& nodal, const TimeGrid& grid, double t) {
  int e = grid.element_of(t);
  double h = grid.element_length(e);
  double w = (t - grid.node(e)) / h;
  return (1.0 - w) * nodal.row(e).transpose() +
         w * nodal.row(e + 1).transpose();
}

}  // namespace

DualField DualField::zero(const TimeGrid& grid, int n, int m) {
  DualField f;
  f.grid = grid;
  const int K = grid.num_elements();
  f.gamma = Mat::Zero(K + 1, n);
  f.lambda = Mat::Zero(K + 1, n);
  f.mu = Mat::Zero(K, m);
  return f;
}

Vec DualField::gamma_at(double t) const { return interp_row(gamma, grid, t); }
Vec DualField::lambda_at(double t) const { return interp_row(lambda, grid, t); }

Vec DualField::mu_at(double t) const {
  return mu.row(grid.element_of(t)).transpose();
}

Vec DualField::gamma_slope(int e) const {
  return (gamma.row(e + 1) - gamma.row(e)).transpose() /
         grid.element_length(e);
}

Vec DualField::lambda_slope(int e) const {
  return (lambda.row(e + 1) - lambda.row(e)).transpose() /
         grid.element_length(e);
}

Vec eval_script_x(const QqrProblem& pb, const DualField& d, double t) {
  int e = d.grid.element_of(t);
  return d.gamma_slope(e) + pb.M.transpose() * d.gamma_at(t) +
         pb.B.transpose() * d.lambda_at(t);
}

Vec eval_script_p(const QqrProblem& pb, const DualField& d, double t) {
  int e = d.grid.element_of(t);
  return d.lambda_slope(e) - pb.M * d.lambda_at(t) - pb.N * d.mu_at(t);
}

Vec eval_script_u(const QqrProblem& pb, const DualField& d, double t) {
  return pb.N.transpose() * d.gamma_at(t) + pb.C * d.mu_at(t);
}

std::pair<Vec, Vec> eval_bars(const QqrProblem& pb, const DualField& d,
                              double t) {
  if (pb.is_lqr()) {
    return {Vec::Zero(pb.n), Vec::Zero(pb.n)};
  }
  Vec gamma = d.gamma_at(t);
  Vec lambda = d.lambda_at(t);
  Vec xb = pb.base.x(t);
  Vec pb_bar = pb.base.p(t);
  Mat fl = pb.lambda_contraction(lambda);
  // bar_x_i = (γF)_is x̄_s - p̄_j (Fλ)_ji ; bar_p = -(Fλ) x̄.
  Vec bar_x = pb.gamma_contraction(gamma) * xb - fl.transpose() * pb_bar;
  Vec bar_p = -fl * xb;
  return {bar_x, bar_p};
}

Mat assemble_kkt(const QqrProblem& pb, const Vec& gamma, const Vec& lambda) {
  const int n = pb.n;
  Mat kkt = Mat::Zero(2 * n, 2 * n);
  kkt.topLeftCorner(n, n) = pb.a_x * Mat::Identity(n, n);
  kkt.bottomRightCorner(n, n) = pb.a_p * Mat::Identity(n, n);
  if (!pb.is_lqr()) {
    Mat fl = pb.lambda_contraction(lambda);
    kkt.topLeftCorner(n, n) += pb.gamma_contraction(gamma);
    kkt.topRightCorner(n, n) = -fl.transpose();
    kkt.bottomLeftCorner(n, n) = -fl;
  }
  return kkt;
}

Vec assemble_rhs(const QqrProblem& pb, const DualField& d, double t) {
  auto [bar_x, bar_p] = eval_bars(pb, d, t);
  Vec rhs(2 * pb.n);
  rhs.head(pb.n) = eval_script_x(pb, d, t) + bar_x;
  rhs.tail(pb.n) = eval_script_p(pb, d, t) + bar_p;
  return rhs;
}

DualIntermediates compute_intermediates(const QqrProblem& pb,
                                        const DualField& d, double t) {
  int e = d.grid.element_of(t);
  return intermediates_from_values(pb, d.gamma_at(t), d.gamma_slope(e),
                                   d.lambda_at(t), d.lambda_slope(e),
                                   d.mu_at(t), t);
}

DualIntermediates intermediates_from_values(const QqrProblem& pb,
                                            const Vec& gamma,
                                            const Vec& gamma_dot,
                                            const Vec& lambda,
                                            const Vec& lambda_dot,
                                            const Vec& mu, double t) {
  DualIntermediates im;
  im.script_x = gamma_dot + pb.M.transpose() * gamma + pb.B.transpose() * lambda;
  im.script_p = lambda_dot - pb.M * lambda - pb.N * mu;
  im.script_u = pb.N.transpose() * gamma + pb.C * mu;
  if (pb.is_lqr()) {
    im.bar_x = Vec::Zero(pb.n);
    im.bar_p = Vec::Zero(pb.n);
  } else {
    Mat fl = pb.lambda_contraction(lambda);
    im.bar_x = pb.gamma_contraction(gamma) * pb.base.x(t) -
               fl.transpose() * pb.base.p(t);
    im.bar_p = -fl * pb.base.x(t);
  }
  im.rhs = Vec(2 * pb.n);
  im.rhs.head(pb.n) = im.script_x + im.bar_x;
  im.rhs.tail(pb.n) = im.script_p + im.bar_p;
  im.kkt = assemble_kkt(pb, gamma, lambda);
  return im;
}

}  // namespace ocdual
