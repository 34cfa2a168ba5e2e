#pragma once

#include <vector>

#include "ocdual/common.hpp"

namespace ocdual {

// Partition of [0, T] with per-element 3-point Gauss-Legendre quadrature
// (exact through degree 5, so all F = 0 integrands on the hat/constant
// basis are integrated exactly).
class TimeGrid {
 public:
  static TimeGrid uniform(double final_time, int num_elements);
  static TimeGrid from_nodes(std::vector<double> nodes);

  double final_time() const { return nodes_.back(); }
  int num_elements() const { return static_cast<int>(nodes_.size()) - 1; }
  const std::vector<double>& nodes() const { return nodes_; }
  double node(int j) const { return nodes_[j]; }
  double element_length(int e) const { return nodes_[e + 1] - nodes_[e]; }
  double element_midpoint(int e) const {
    return 0.5 * (nodes_[e] + nodes_[e + 1]);
  }

  static constexpr int kQuadOrder = 3;
  // Quadrature abscissa/weight for point q of element e, mapped to [t_e, t_{e+1}].
  double quad_point(int e, int q) const;
  double quad_weight(int e, int q) const;

  // Element whose closure contains t; nodes resolve to the right element
  // (t = T resolves to the last element).
  int element_of(double t) const;

 private:
  explicit TimeGrid(std::vector<double> nodes);
  std::vector<double> nodes_;
};

}  // namespace ocdual
