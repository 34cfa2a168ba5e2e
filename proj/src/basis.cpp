#include "ocdual/basis.hpp"

#include <stdexcept>

namespace ocdual {

RitzBasis::RitzBasis(TimeGrid grid, const QqrProblem& problem)
    : grid_(std::move(grid)),
      n_(problem.n),
      m_(problem.m),
      G_(problem.G),
      lambda0_(problem.lambda0) {
  const int K = grid_.num_elements();
  num_free_ = n_ * K + n_ * K + m_ * K;
}

int RitzBasis::gamma_dof(int node, int comp) const {
  const int K = grid_.num_elements();
  if (node < 0 || node > K - 1) {
    throw std::invalid_argument("gamma_dof: last gamma node is eliminated");
  }
  return node * n_ + comp;
}

int RitzBasis::lambda_dof(int node, int comp) const {
  const int K = grid_.num_elements();
  if (node < 1 || node > K) {
    throw std::invalid_argument("lambda_dof: first lambda node is fixed");
  }
  return n_ * K + (node - 1) * n_ + comp;
}

int RitzBasis::mu_dof(int element, int comp) const {
  const int K = grid_.num_elements();
  if (element < 0 || element >= K) {
    throw std::invalid_argument("mu_dof: element out of range");
  }
  return 2 * n_ * K + element * m_ + comp;
}

DualField RitzBasis::field_from_coeffs(const Vec& coeffs) const {
  if (coeffs.size() != num_free_) {
    throw std::invalid_argument("field_from_coeffs: wrong coefficient count");
  }
  const int K = grid_.num_elements();
  DualField f;
  f.grid = grid_;
  f.gamma = Mat::Zero(K + 1, n_);
  f.lambda = Mat::Zero(K + 1, n_);
  f.mu = Mat::Zero(K, m_);
  for (int j = 0; j < K; ++j) {
    for (int c = 0; c < n_; ++c) f.gamma(j, c) = coeffs[gamma_dof(j, c)];
  }
  f.lambda.row(0) = lambda0_.transpose();
  for (int j = 1; j <= K; ++j) {
    for (int c = 0; c < n_; ++c) f.lambda(j, c) = coeffs[lambda_dof(j, c)];
  }
  f.gamma.row(K) = (G_ * f.lambda.row(K).transpose()).transpose();
  for (int e = 0; e < K; ++e) {
    for (int c = 0; c < m_; ++c) f.mu(e, c) = coeffs[mu_dof(e, c)];
  }
  return f;
}

Vec RitzBasis::coeffs_from_field(const DualField& field) const {
  const int K = grid_.num_elements();
  Vec coeffs = Vec::Zero(num_free_);
  for (int j = 0; j < K; ++j) {
    for (int c = 0; c < n_; ++c) coeffs[gamma_dof(j, c)] = field.gamma(j, c);
  }
  for (int j = 1; j <= K; ++j) {
    for (int c = 0; c < n_; ++c) coeffs[lambda_dof(j, c)] = field.lambda(j, c);
  }
  for (int e = 0; e < K; ++e) {
    for (int c = 0; c < m_; ++c) coeffs[mu_dof(e, c)] = field.mu(e, c);
  }
  return coeffs;
}

Vec RitzBasis::fold_full_gradient(const Mat& grad_gamma,
                                  const Mat& grad_lambda,
                                  const Mat& grad_mu) const {
  const int K = grid_.num_elements();
  Vec g = Vec::Zero(num_free_);
  for (int j = 0; j < K; ++j) {
    for (int c = 0; c < n_; ++c) g[gamma_dof(j, c)] = grad_gamma(j, c);
  }
  for (int j = 1; j <= K; ++j) {
    for (int c = 0; c < n_; ++c) g[lambda_dof(j, c)] = grad_lambda(j, c);
  }
  // gamma_K = G lambda_K: route the eliminated row through Gᵀ.
  Vec folded = G_.transpose() * grad_gamma.row(K).transpose();
  for (int c = 0; c < n_; ++c) g[lambda_dof(K, c)] += folded[c];
  for (int e = 0; e < K; ++e) {
    for (int c = 0; c < m_; ++c) g[mu_dof(e, c)] = grad_mu(e, c);
  }
  return g;
}

double integrate(const TimeGrid& grid, const std::function<double(double)>& f,
                 int num_threads) {
  return quadrature_map_reduce<double>(
      grid, num_threads,
      [&](int e) {
        double acc = 0.0;
        for (int q = 0; q < TimeGrid::kQuadOrder; ++q) {
          acc += grid.quad_weight(e, q) * f(grid.quad_point(e, q));
        }
        return acc;
      },
      0.0, [](double a, double b) { return a + b; });
}

}  // namespace ocdual
