#pragma once

#include <memory>

#include "ocdual/basis.hpp"
#include "ocdual/common.hpp"
#include "ocdual/report.hpp"
#include "ocdual/trajectory.hpp"

namespace ocdual {

// Galerkin system of the F = 0 dual problem over the free coefficients.  The
// matrix is the second variation (symmetric PSD, independent of x0 and A);
// the load collects the base state, forcing, boundary term, and the
// contributions of the eliminated lambda0 node.
struct LqrSystem {
  Mat matrix;
  Vec load;
};

// Singular values below 1e-12 * sv_max are truncated; solves return the
// minimum-norm solution.
inline constexpr double kSvdTruncation = 1e-12;

Mat assemble_bilinear(const QqrProblem& pb, const RitzBasis& basis,
                      int num_threads = 1);
Vec assemble_load(const QqrProblem& pb, const RitzBasis& basis,
                  int num_threads = 1);
LqrSystem assemble_lqr_system(const QqrProblem& pb, const RitzBasis& basis,
                              int num_threads = 1);

// Reusable SVD of the bilinear matrix; valid for any load (x0, A, base,
// lambda0 all live in the load).
class LqrFactorization {
 public:
  LqrFactorization(const QqrProblem& pb, const RitzBasis& basis,
                   int num_threads = 1);

  Vec solve(const Vec& load) const;
  int rank() const { return rank_; }
  int truncated() const { return truncated_; }
  double sv_max() const { return sv_max_; }
  double sv_min_kept() const { return sv_min_kept_; }
  const Mat& matrix() const { return matrix_; }
  double assembly_seconds() const { return assembly_seconds_; }
  double factorization_seconds() const { return factorization_seconds_; }

 private:
  Mat matrix_;
  Eigen::BDCSVD<Mat> svd_;
  int rank_ = 0, truncated_ = 0;
  double sv_max_ = 0.0, sv_min_kept_ = 0.0;
  double assembly_seconds_ = 0.0, factorization_seconds_ = 0.0;
};

struct LqrSolution {
  DualField dual;
  PrimalTriple primal;
  SolveReport report;
};

// Direct linear solve of the F = 0 dual problem; wrong-solver error if the
// problem carries a nonzero tensor.  C is never required to be invertible.
LqrSolution solve_lqr(const QqrProblem& pb, const RitzBasis& basis,
                      int num_threads = 1);

// Solve against a precomputed factorization; identical results to a fresh
// solve, strictly cheaper per additional (x0, A) instance.
LqrSolution solve_lqr_cached(const QqrProblem& pb, const RitzBasis& basis,
                             const LqrFactorization& factorization,
                             int num_threads = 1);

}  // namespace ocdual
