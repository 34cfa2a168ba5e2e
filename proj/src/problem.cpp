#include "ocdual/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace ocdual {
namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

void check_symmetric_psd(const Mat& S, const char* name) {
  std::string n(name);
  if (S.rows() != S.cols()) {
    throw std::invalid_argument(n + " must be square");
  }
  double scale = S.norm();
  if ((S - S.transpose()).norm() > 1e-12 * (1.0 + scale)) {
    throw std::invalid_argument(n + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  if (es.eigenvalues().minCoeff() < -1e-10 * (1.0 + scale)) {
    throw std::invalid_argument(n + " must be positive semi-definite");
  }
}

}  // namespace

void QqrProblem::validate() const {
  require(n >= 1 && m >= 1, "dimensions must be positive");
  require(T > 0.0, "final time must be positive");
  require(B.rows() == n && B.cols() == n, "B must be n x n");
  require(C.rows() == m && C.cols() == m, "C must be m x m");
  require(G.rows() == n && G.cols() == n, "G must be n x n");
  require(M.rows() == n && M.cols() == n, "M must be n x n");
  require(N.rows() == n && N.cols() == m, "N must be n x m");
  check_symmetric_psd(B, "B");
  check_symmetric_psd(C, "C");
  check_symmetric_psd(G, "G");
  if (!F.empty()) {
    require(static_cast<int>(F.size()) == n, "F must have n slices");
    for (const Mat& slice : F) {
      require(slice.rows() == n && slice.cols() == n, "F slices must be n x n");
      require(slice == slice.transpose(),
              "F must be exactly symmetric in its last two indices");
    }
  }
  require(A.dim() == n, "forcing dimension mismatch");
  require(x0.size() == n, "x0 dimension mismatch");
  require(lambda0.size() == n, "lambda0 dimension mismatch");
  require(a_x > 0.0 && a_u > 0.0 && a_p > 0.0, "weights must be positive");
  require(base.x.dim() == n && base.u.dim() == m && base.p.dim() == n,
          "base state dimension mismatch");
  require(grid_elements >= 1, "grid must have at least one element");
  for (double v : x0) require(std::isfinite(v), "x0 must be finite");
  for (double v : lambda0) require(std::isfinite(v), "lambda0 must be finite");
}

bool QqrProblem::is_lqr() const {
  for (const Mat& slice : F) {
    if (slice.norm() != 0.0) return false;
  }
  return true;
}

double QqrProblem::tensor_norm() const {
  double sq = 0.0;
  for (const Mat& slice : F) sq += slice.squaredNorm();
  return std::sqrt(sq);
}

Mat QqrProblem::gamma_contraction(const Vec& gamma) const {
  Mat out = Mat::Zero(n, n);
  for (int k = 0; k < static_cast<int>(F.size()); ++k) {
    out += gamma[k] * F[k];
  }
  return out;
}

Mat QqrProblem::lambda_contraction(const Vec& lambda) const {
  Mat out = Mat::Zero(n, n);
  for (int i = 0; i < static_cast<int>(F.size()); ++i) {
    out.row(i) = (F[i] * lambda).transpose();
  }
  return out;
}

Vec QqrProblem::quadratic_dynamics(const Vec& x) const {
  Vec out = Vec::Zero(n);
  for (int i = 0; i < static_cast<int>(F.size()); ++i) {
    out[i] = x.dot(F[i] * x);
  }
  return out;
}

Vec QqrProblem::costate_coupling(const Vec& p, const Vec& x) const {
  Vec out = Vec::Zero(n);
  for (int j = 0; j < static_cast<int>(F.size()); ++j) {
    out += p[j] * (F[j] * x);
  }
  return out;
}

Vec QqrProblem::dynamics_rhs(double t, const Vec& x, const Vec& u) const {
  Vec rhs = A(t) + M * x + N * u;
  if (!F.empty()) rhs += 0.5 * quadratic_dynamics(x);
  return rhs;
}

QqrProblem QqrProblem::linearized() const {
  QqrProblem copy = *this;
  copy.F.clear();
  return copy;
}

}  // namespace ocdual
