#pragma once

#include <utility>
#include <vector>

#include "ocdual/common.hpp"
#include "ocdual/dual_field.hpp"
#include "ocdual/problem.hpp"
#include "ocdual/time_grid.hpp"

namespace ocdual {

// Lowest-order conforming Ritz basis: continuous piecewise-linear hats per
// component for γ and λ (H¹), piecewise constants for μ (L²).  The two
// boundary constraints are eliminated, not penalized:
//   λ(0) = lambda0   -> λ's first node is fixed data,
//   γ(T) = G λ(T)    -> γ's last node is computed from λ's last node.
// Free coefficient layout: [γ nodes 0..K-1] [λ nodes 1..K] [μ elements 0..K-1],
// each block component-major by node/element.
class RitzBasis {
 public:
  RitzBasis(TimeGrid grid, const QqrProblem& problem);

  const TimeGrid& grid() const { return grid_; }
  int n() const { return n_; }
  int m() const { return m_; }
  int num_free_dofs() const { return num_free_; }

  int gamma_dof(int node, int comp) const;   // node in 0..K-1
  int lambda_dof(int node, int comp) const;  // node in 1..K
  int mu_dof(int element, int comp) const;

  // Applies the eliminated constraints; exact round-trip with
  // coeffs_from_field on the free subspace.
  DualField field_from_coeffs(const Vec& coeffs) const;
  Vec coeffs_from_field(const DualField& field) const;
  DualField zero_field() const { return field_from_coeffs(Vec::Zero(num_free_)); }

  // Folds a gradient over all nodal values (γ rows 0..K, λ rows 0..K, μ) into
  // the free-dof gradient, routing the eliminated γ_K row through Gᵀ.
  Vec fold_full_gradient(const Mat& grad_gamma, const Mat& grad_lambda,
                         const Mat& grad_mu) const;

 private:
  TimeGrid grid_;
  int n_, m_;
  Mat G_;
  Vec lambda0_;
  int num_free_;
};

// Deterministic element-wise map/reduce: per-element results are computed
// (optionally on several threads) into a fixed slot each and reduced in
// element order, so the sum is bit-identical for any thread count.
template <typename T, typename PerElement, typename Reduce>
T quadrature_map_reduce(const TimeGrid& grid, int num_threads,
                        PerElement per_element, T init, Reduce reduce);

// Integrates a scalar callback over [0, T] with the shared quadrature.
double integrate(const TimeGrid& grid, const std::function<double(double)>& f,
                 int num_threads = 1);

}  // namespace ocdual

#include "ocdual/basis_impl.hpp"
