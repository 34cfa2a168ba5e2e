#pragma once

#include <utility>

#include "ocdual/basis.hpp"
#include "ocdual/common.hpp"
#include "ocdual/dual_field.hpp"

namespace ocdual {

// Computable ingredients of the coercivity analysis: the flow matrix R, its
// exponential at T, the smallest singular values of both sign variants of
// the boundary map x -> π₁(e^{TR}ι(x)) ± G π₂(e^{TR}ι(x)) (the statement
// uses +, the proof -, so both are always reported), and the data-size term
// |x0| + ||A||_L1.
struct CoercivityReport {
  Mat R;
  Mat exp_TR;
  double invert_margin_plus = 0.0;
  double invert_margin_minus = 0.0;
  double data_size = 0.0;
  bool c_invertible = false;   // C numerically invertible
  bool c_applicable = false;   // invertible or weakened kernel/image condition
};

// R = [[-Mᵀ, -Bᵀ], [NC⁻¹Nᵀ, M]]; when C is singular the restricted inverse
// is used, valid under ker(C) ⊆ ker(N) and im(Nᵀ) ⊆ im(C)
// (NotApplicableError when neither invertibility nor the weakened condition
// holds).
Mat build_R(const QqrProblem& pb);

// Scaling-and-squaring with a truncated series kernel.
Mat matrix_exponential(const Mat& A, double t);

CoercivityReport check_invertibility(const QqrProblem& pb, const TimeGrid& grid);

enum class NonCoerciveKind { kKernelDirection, kLargeData };

struct FamilyMember {
  DualField field;
  double value = 0.0;     // S̃_Q evaluated on the member
  bool finite = true;
  double bound = 0.0;     // closed-form bound (kLargeData only)
};

// Counterexample families of §-style unbounded dual sequences.
//   kKernelDirection: D^(k) = e^{tR}(k γ₀, 0) with μ = -C⁻¹Nᵀγ, γ₀ a kernel
//     vector of the minus-variant boundary map oriented so γ₀·x0 <= 0;
//     NotApplicableError when the map is invertible.
//   kLargeData: on the fixed benchmark problem (n = m = 2, B = C = G = I,
//     M = 0, N = diag(1,0), F_irs = δ_rs, unit weights) builds λ = 0,
//     γ = (0, k(T-t)²), μ = 0 and checks the evaluated value against the
//     closed-form bound kT(2 - x0₂T - ∫A₂(t)(t-T)²/T dt).
FamilyMember non_coercive_family(const QqrProblem& pb, const RitzBasis& basis,
                                 NonCoerciveKind kind, int k);

// The kLargeData benchmark problem.
QqrProblem make_large_data_problem(const Vec& x0, double T, int grid_elements);

}  // namespace ocdual
