#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ocdual {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Thrown when a method's mathematical preconditions are not met by the
// problem data (e.g. Riccati with singular C), as opposed to bad input.
class NotApplicableError : public std::runtime_error {
 public:
  explicit NotApplicableError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace ocdual
