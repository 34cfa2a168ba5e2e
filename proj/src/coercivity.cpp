#include "ocdual/coercivity.hpp"

#include <cmath>

#include "ocdual/functional.hpp"

namespace ocdual {
namespace {

constexpr double kSubspaceTol = 1e-10;

struct CEigs {
  Eigen::SelfAdjointEigenSolver<Mat> es;
  double thresh = 0.0;
  bool invertible = false;

  explicit CEigs(const Mat& C) : es(C) {
    double hi = es.eigenvalues().cwiseAbs().maxCoeff();
    thresh = 1e-12 * hi;
    invertible = hi > 0.0 && es.eigenvalues().cwiseAbs().minCoeff() > thresh;
  }

  Mat pinv() const {
    Mat out = Mat::Zero(es.eigenvectors().rows(), es.eigenvectors().rows());
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      if (std::abs(es.eigenvalues()[i]) > thresh) {
        out += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose() /
               es.eigenvalues()[i];
      }
    }
    return out;
  }
};

// ker(C) ⊆ ker(N) and im(Nᵀ) ⊆ im(C): the weakened condition under which
// NC⁻¹ is well-defined on im(C).
bool weakened_condition(const Mat& N, const CEigs& ce) {
  const double scale = 1.0 + N.norm();
  for (int i = 0; i < ce.es.eigenvalues().size(); ++i) {
    if (std::abs(ce.es.eigenvalues()[i]) <= ce.thresh) {
      if ((N * ce.es.eigenvectors().col(i)).norm() > kSubspaceTol * scale) {
        return false;
      }
    }
  }
  // Projector onto im(C).
  Mat proj = Mat::Zero(ce.es.eigenvectors().rows(), ce.es.eigenvectors().rows());
  for (int i = 0; i < ce.es.eigenvalues().size(); ++i) {
    if (std::abs(ce.es.eigenvalues()[i]) > ce.thresh) {
      proj += ce.es.eigenvectors().col(i) * ce.es.eigenvectors().col(i).transpose();
    }
  }
  Mat nt = N.transpose();
  if ((nt - proj * nt).norm() > kSubspaceTol * scale) return false;
  return true;
}

}  // namespace

Mat build_R(const QqrProblem& pb) {
  CEigs ce(pb.C);
  if (!ce.invertible && !weakened_condition(pb.N, ce)) {
    throw NotApplicableError(
        "build_R: C is singular and the kernel/image condition fails");
  }
  const int n = pb.n;
  Mat R(2 * n, 2 * n);
  R.topLeftCorner(n, n) = -pb.M.transpose();
  R.topRightCorner(n, n) = -pb.B.transpose();
  R.bottomLeftCorner(n, n) = pb.N * ce.pinv() * pb.N.transpose();
  R.bottomRightCorner(n, n) = pb.M;
  return R;
}

Mat matrix_exponential(const Mat& A, double t) {
  if (!A.allFinite()) {
    throw std::invalid_argument("matrix_exponential: non-finite entries");
  }
  const int n = static_cast<int>(A.rows());
  Mat B = t * A;
  double norm = B.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    B /= std::pow(2.0, squarings);
  }
  Mat term = Mat::Identity(n, n);
  Mat sum = Mat::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = term * B / static_cast<double>(k);
    sum += term;
    if (term.norm() <= 1e-18 * sum.norm()) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

CoercivityReport check_invertibility(const QqrProblem& pb,
                                     const TimeGrid& grid) {
  CoercivityReport rep;
  CEigs ce(pb.C);
  rep.c_invertible = ce.invertible;
  rep.c_applicable = ce.invertible || weakened_condition(pb.N, ce);
  rep.R = build_R(pb);  // throws when not applicable
  rep.exp_TR = matrix_exponential(rep.R, pb.T);
  const int n = pb.n;
  Mat phi1 = rep.exp_TR.topLeftCorner(n, n);
  Mat phi2 = rep.exp_TR.bottomLeftCorner(n, n);
  Eigen::JacobiSVD<Mat> svd_plus(phi1 + pb.G * phi2);
  Eigen::JacobiSVD<Mat> svd_minus(phi1 - pb.G * phi2);
  rep.invert_margin_plus = svd_plus.singularValues().minCoeff();
  rep.invert_margin_minus = svd_minus.singularValues().minCoeff();
  double a_l1 = 0.0;
  if (!pb.A.is_zero()) {
    a_l1 = integrate(grid, [&](double t) { return pb.A(t).norm(); });
  }
  rep.data_size = pb.x0.norm() + a_l1;
  return rep;
}

QqrProblem make_large_data_problem(const Vec& x0, double T,
                                   int grid_elements) {
  QqrProblem pb;
  pb.n = 2;
  pb.m = 2;
  pb.T = T;
  pb.B = Mat::Identity(2, 2);
  pb.C = Mat::Identity(2, 2);
  pb.G = Mat::Identity(2, 2);
  pb.M = Mat::Zero(2, 2);
  pb.N = Mat::Zero(2, 2);
  pb.N(0, 0) = 1.0;
  pb.F = {Mat::Identity(2, 2), Mat::Identity(2, 2)};
  pb.A = VectorSignal::zero(2);
  pb.x0 = x0;
  pb.lambda0 = Vec::Zero(2);
  pb.base = BaseState::zero(2, 2);
  pb.grid_elements = grid_elements;
  pb.validate();
  return pb;
}

namespace {

bool is_large_data_benchmark(const QqrProblem& pb) {
  if (pb.n != 2 || pb.m != 2) return false;
  if (!pb.B.isIdentity(0.0) || !pb.C.isIdentity(0.0) || !pb.G.isIdentity(0.0)) {
    return false;
  }
  if (pb.M.norm() != 0.0) return false;
  Mat n_expect = Mat::Zero(2, 2);
  n_expect(0, 0) = 1.0;
  if (pb.N != n_expect) return false;
  if (pb.F.size() != 2 || !pb.F[0].isIdentity(0.0) || !pb.F[1].isIdentity(0.0)) {
    return false;
  }
  if (pb.a_x != 1.0 || pb.a_u != 1.0 || pb.a_p != 1.0) return false;
  if (pb.lambda0.norm() != 0.0) return false;
  return true;
}

}  // namespace

FamilyMember non_coercive_family(const QqrProblem& pb, const RitzBasis& basis,
                                 NonCoerciveKind kind, int k) {
  if (k < 1) throw std::invalid_argument("non_coercive_family: k >= 1");
  const TimeGrid& grid = basis.grid();
  const int K = grid.num_elements();
  const double T = grid.final_time();
  FamilyMember member;

  if (kind == NonCoerciveKind::kKernelDirection) {
    if (!pb.is_lqr() || !pb.A.is_zero() || pb.lambda0.norm() != 0.0) {
      throw NotApplicableError(
          "kernel_direction family: requires F = 0, A = 0, lambda0 = 0");
    }
    Mat R = build_R(pb);
    Mat E = matrix_exponential(R, T);
    const int n = pb.n;
    Mat map_minus =
        E.topLeftCorner(n, n) - pb.G * E.bottomLeftCorner(n, n);
    Eigen::JacobiSVD<Mat> svd(map_minus, Eigen::ComputeFullV);
    double sigma_min = svd.singularValues().minCoeff();
    double sigma_max = svd.singularValues().maxCoeff();
    if (sigma_min > 1e-8 * (1.0 + sigma_max)) {
      throw NotApplicableError(
          "kernel_direction family: boundary map is invertible");
    }
    Vec gamma0 = svd.matrixV().col(n - 1);
    if (gamma0.dot(pb.x0) > 0.0) gamma0 = -gamma0;

    CEigs ce(pb.C);
    Mat c_pinv = ce.pinv();
    DualField f = DualField::zero(grid, pb.n, pb.m);
    Vec seed(2 * n);
    seed.head(n) = static_cast<double>(k) * gamma0;
    seed.tail(n).setZero();
    for (int j = 0; j <= K; ++j) {
      Vec gl = matrix_exponential(R, grid.node(j)) * seed;
      f.gamma.row(j) = gl.head(n).transpose();
      f.lambda.row(j) = gl.tail(n).transpose();
    }
    for (int e = 0; e < K; ++e) {
      Vec gl = matrix_exponential(R, grid.element_midpoint(e)) * seed;
      f.mu.row(e) = (-c_pinv * pb.N.transpose() * gl.head(n)).transpose();
    }
    member.field = f;
    FunctionalValue fv = eval_s_tilde(pb, basis, f);
    member.value = fv.value;
    member.finite = fv.finite;
    return member;
  }

  // kLargeData
  if (!is_large_data_benchmark(pb)) {
    throw std::invalid_argument(
        "large_data family: problem is not the fixed benchmark instance");
  }
  DualField f = DualField::zero(grid, 2, 2);
  for (int j = 0; j <= K; ++j) {
    double s = T - grid.node(j);
    f.gamma(j, 1) = k * s * s;
  }
  member.field = f;
  FunctionalValue fv = eval_s_tilde(pb, basis, f);
  member.value = fv.value;
  member.finite = fv.finite;

  double forcing_term = 0.0;
  if (!pb.A.is_zero()) {
    forcing_term = integrate(grid, [&](double t) {
      return pb.A(t)[1] * (t - T) * (t - T) / T;
    });
  }
  member.bound = k * T * (2.0 - pb.x0[1] * T - forcing_term);
  if (member.finite && member.value > member.bound + 1e-8) {
    throw std::logic_error(
        "large_data family: evaluated value exceeds the closed-form bound");
  }
  return member;
}

}  // namespace ocdual
