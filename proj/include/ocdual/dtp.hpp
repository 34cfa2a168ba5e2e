#pragma once

#include "ocdual/common.hpp"
#include "ocdual/dual_field.hpp"

namespace ocdual {

// Floating-point slack on the exact cone conditions.
inline constexpr double kPsdTol = 1e-10;    // relative to the spectral norm
inline constexpr double kImageTol = 1e-8;   // residual vs (|rhs| + 1)

enum class Feasibility { kPsdInImage, kIndefinite, kOutOfImage };

// Eigendecomposition of a symmetric matrix with the kernel convention of the
// pointwise max: eigenvalues below psd_tol * ||K|| are kernel.
struct SymmetricPinv {
  explicit SymmetricPinv(const Mat& sym, double psd_tol = kPsdTol);
  double min_eigenvalue() const { return eigenvalues.minCoeff(); }
  double spectral_norm() const;
  bool is_psd(double psd_tol = kPsdTol) const;
  // Minimum-norm solution of K y = b (restricted inverse on ker(K)ᵖᵉʳᵖ).
  Vec solve(const Vec& b) const;
  // b · K⁺ b without forming the solution.
  double quadratic_form(const Vec& b) const;

  Vec eigenvalues;
  Mat eigenvectors;
  double kernel_threshold;
};

Feasibility classify_feasibility(const Mat& kkt, const Vec& rhs,
                                 double psd_tol = kPsdTol,
                                 double image_tol = kImageTol);

// Primal point recovered at one time instant.
struct DtpPoint {
  Vec x, u, p;
  bool feasible = false;
  double kkt_residual = 0.0;  // ||K (U* - Ū*) + rhs|| after the solve
};

// Change of variables -K (U* - Ū*) = rhs, -a_u (u - ū) = script_u.  On the
// cone (K PSD, rhs in im K) returns the minimum-norm solution; otherwise
// feasible = false and the primal entries are unset.  Non-symmetric K is a
// contract violation.
DtpPoint dtp_map(const Mat& kkt, const Vec& rhs, const Vec& script_u,
                 const Vec& base_x, const Vec& base_u, const Vec& base_p,
                 double a_u, double psd_tol = kPsdTol,
                 double image_tol = kImageTol);

// Convenience overload from the bundled intermediates.
DtpPoint dtp_map(const QqrProblem& pb, const DualIntermediates& im, double t);

}  // namespace ocdual
