#pragma once

#include <vector>

#include "ocdual/basis.hpp"
#include "ocdual/common.hpp"
#include "ocdual/dtp.hpp"
#include "ocdual/dual_field.hpp"
#include "ocdual/trajectory.hpp"

namespace ocdual {

// Value of the convexified dual functional.  +infinity (any quadrature point
// off the feasibility cone) is an explicit flag, never a float that enters
// arithmetic.
struct FunctionalValue {
  double value = 0.0;
  bool finite = true;
  std::vector<double> element_density;  // per-element integral, diagnostics

  static FunctionalValue infinite() { return {0.0, false, {}}; }
};

struct DensityValue {
  double value = 0.0;
  bool finite = true;
};

// Pointwise dual density: ½(rhs·K⁺rhs + |script_u|²/a_u) - x̄·(script_x +
// ½bar_x) - p̄·(script_p + ½bar_p) - ū·script_u - A·γ, finite exactly on the
// cone.
DensityValue dual_density(const QqrProblem& pb, const DualField& d, double t);
DensityValue density_from_intermediates(const QqrProblem& pb,
                                        const DualIntermediates& im,
                                        const Vec& gamma_value, double t);

// Quadrature of the density minus the boundary term γ(0)·x0.
FunctionalValue eval_s_tilde(const QqrProblem& pb, const RitzBasis& basis,
                             const DualField& d, int num_threads = 1);

// Exact gradient of the discrete functional w.r.t. the free coefficients,
// computed with the inner maximizer held fixed (valid on the strict interior
// of the cone).  Throws std::domain_error at or outside the cone boundary.
Vec eval_gradient(const QqrProblem& pb, const RitzBasis& basis,
                  const DualField& d, int num_threads = 1);

// Pointwise lower bound on the dual density (base = 0, forcing excluded):
//   |α + Mᵀγ + Bᵀλ|² / 2(a_x + |F|(|γ|+|λ|))
// + |β - Mλ - Nμ|²  / 2(a_p + |F||λ|)
// + |Nᵀγ + Cμ|²     / 2 a_u,
// with |F| the tensor Frobenius norm; exact for F = 0.
double g_lower_bound(const Vec& gamma, const Vec& alpha, const Vec& lambda,
                     const Vec& beta, const Vec& mu, const QqrProblem& pb);

// -∫ ½(a_x|x|² + a_u|u|² + a_p|p|²) dt over a primal solution; every finite
// dual value must exceed it.  Composite Simpson on uniform samples,
// trapezoid otherwise.
double lower_bound_certificate(const QqrProblem& pb,
                               const PrimalTriple& primal);

// The pre-dual integrand at an explicit primal point (test oracle for
// sup-consistency and concavity checks).
double lagrangian_density(const QqrProblem& pb, const DualIntermediates& im,
                          const Vec& gamma_value, double t, const Vec& x,
                          const Vec& u, const Vec& p);

// Smallest eigenvalue of the pointwise kkt matrix over all quadrature nodes;
// min(a_x, a_p) exactly for F = 0.
double min_cone_eigenvalue(const QqrProblem& pb, const RitzBasis& basis,
                           const DualField& d, int num_threads = 1);

}  // namespace ocdual
