#include "ocdual/dtp.hpp"

#include <cmath>
#include <stdexcept>

namespace ocdual {

SymmetricPinv::SymmetricPinv(const Mat& sym, double psd_tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  eigenvalues = es.eigenvalues();
  eigenvectors = es.eigenvectors();
  kernel_threshold = psd_tol * spectral_norm();
}

double SymmetricPinv::spectral_norm() const {
  return eigenvalues.cwiseAbs().maxCoeff();
}

bool SymmetricPinv::is_psd(double psd_tol) const {
  return eigenvalues.minCoeff() >= -psd_tol * spectral_norm();
}

Vec SymmetricPinv::solve(const Vec& b) const {
  Vec y = Vec::Zero(b.size());
  for (int i = 0; i < eigenvalues.size(); ++i) {
    if (std::abs(eigenvalues[i]) > kernel_threshold) {
      y += (eigenvectors.col(i).dot(b) / eigenvalues[i]) * eigenvectors.col(i);
    }
  }
  return y;
}

double SymmetricPinv::quadratic_form(const Vec& b) const {
  double acc = 0.0;
  for (int i = 0; i < eigenvalues.size(); ++i) {
    if (std::abs(eigenvalues[i]) > kernel_threshold) {
      double c = eigenvectors.col(i).dot(b);
      acc += c * c / eigenvalues[i];
    }
  }
  return acc;
}

Feasibility classify_feasibility(const Mat& kkt, const Vec& rhs,
                                 double psd_tol, double image_tol) {
  SymmetricPinv pinv(kkt, psd_tol);
  if (!pinv.is_psd(psd_tol)) return Feasibility::kIndefinite;
  Vec delta = pinv.solve(rhs);
  double residual = (kkt * delta - rhs).norm();
  if (residual > image_tol * (rhs.norm() + 1.0)) {
    return Feasibility::kOutOfImage;
  }
  return Feasibility::kPsdInImage;
}

DtpPoint dtp_map(const Mat& kkt, const Vec& rhs, const Vec& script_u,
                 const Vec& base_x, const Vec& base_u, const Vec& base_p,
                 double a_u, double psd_tol, double image_tol) {
  if ((kkt - kkt.transpose()).norm() != 0.0) {
    throw std::invalid_argument("dtp_map: kkt matrix must be exactly symmetric");
  }
  const int n = static_cast<int>(base_x.size());
  DtpPoint out;
  SymmetricPinv pinv(kkt, psd_tol);
  if (!pinv.is_psd(psd_tol)) {
    out.feasible = false;
    return out;
  }
  Vec delta = pinv.solve(-rhs);
  out.kkt_residual = (kkt * delta + rhs).norm();
  if (out.kkt_residual > image_tol * (rhs.norm() + 1.0)) {
    out.feasible = false;
    return out;
  }
  out.feasible = true;
  out.x = base_x + delta.head(n);
  out.p = base_p + delta.tail(n);
  out.u = base_u - script_u / a_u;
  return out;
}

DtpPoint dtp_map(const QqrProblem& pb, const DualIntermediates& im, double t) {
  return dtp_map(im.kkt, im.rhs, im.script_u, pb.base.x(t), pb.base.u(t),
                 pb.base.p(t), pb.a_u);
}

}  // namespace ocdual
