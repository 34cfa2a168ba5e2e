#include "ocdual/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ocdual {
namespace {

// 3-point Gauss-Legendre on [-1, 1].
constexpr double kAbscissa[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double kWeight[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

}  // namespace

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) {
    throw std::invalid_argument("TimeGrid: need at least two nodes");
  }
  if (nodes_.front() != 0.0) {
    throw std::invalid_argument("TimeGrid: first node must be exactly 0");
  }
  for (size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) {
      throw std::invalid_argument("TimeGrid: nodes must be strictly increasing");
    }
  }
  if (!(nodes_.back() > 0.0) || !std::isfinite(nodes_.back())) {
    throw std::invalid_argument("TimeGrid: final time must be positive and finite");
  }
}

TimeGrid TimeGrid::uniform(double final_time, int num_elements) {
  if (num_elements < 1) {
    throw std::invalid_argument("TimeGrid: need at least one element");
  }
  std::vector<double> nodes(num_elements + 1);
  for (int j = 0; j <= num_elements; ++j) {
    nodes[j] = final_time * static_cast<double>(j) / num_elements;
  }
  nodes[0] = 0.0;
  nodes[num_elements] = final_time;
  return TimeGrid(std::move(nodes));
}

TimeGrid TimeGrid::from_nodes(std::vector<double> nodes) {
  return TimeGrid(std::move(nodes));
}

double TimeGrid::quad_point(int e, int q) const {
  return element_midpoint(e) + 0.5 * element_length(e) * kAbscissa[q];
}

double TimeGrid::quad_weight(int e, int q) const {
  return 0.5 * element_length(e) * kWeight[q];
}

int TimeGrid::element_of(double t) const {
  if (t < 0.0 || t > final_time()) {
    throw std::domain_error("TimeGrid: t outside [0, T]");
  }
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  int e = static_cast<int>(it - nodes_.begin()) - 1;
  return std::min(e, num_elements() - 1);
}

}  // namespace ocdual
