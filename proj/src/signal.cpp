#include "ocdual/signal.hpp"

#include <algorithm>
#include <stdexcept>

namespace ocdual {

VectorSignal VectorSignal::zero(int dim) {
  VectorSignal s;
  s.kind_ = Kind::kZero;
  s.dim_ = dim;
  return s;
}

VectorSignal VectorSignal::constant(Vec value) {
  VectorSignal s;
  s.kind_ = Kind::kConstant;
  s.dim_ = static_cast<int>(value.size());
  s.constant_ = std::move(value);
  return s;
}

VectorSignal VectorSignal::table(std::vector<double> times, Mat values) {
  if (times.empty() || static_cast<int>(times.size()) != values.rows()) {
    throw std::invalid_argument("VectorSignal: table size mismatch");
  }
  for (size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw std::invalid_argument("VectorSignal: table times must increase");
    }
  }
  VectorSignal s;
  s.kind_ = Kind::kTable;
  s.dim_ = static_cast<int>(values.cols());
  s.times_ = std::move(times);
  s.values_ = std::move(values);
  return s;
}

VectorSignal VectorSignal::hermite_table(std::vector<double> times, Mat values,
                                         Mat derivatives) {
  if (values.rows() != derivatives.rows() ||
      values.cols() != derivatives.cols()) {
    throw std::invalid_argument("VectorSignal: derivative shape mismatch");
  }
  VectorSignal s = table(std::move(times), std::move(values));
  s.kind_ = Kind::kHermite;
  s.derivatives_ = std::move(derivatives);
  return s;
}

VectorSignal VectorSignal::closed_form(int dim, std::function<Vec(double)> fn) {
  VectorSignal s;
  s.kind_ = Kind::kClosedForm;
  s.dim_ = dim;
  s.fn_ = std::move(fn);
  return s;
}

int VectorSignal::segment_of(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  int i = static_cast<int>(it - times_.begin()) - 1;
  return std::clamp(i, 0, static_cast<int>(times_.size()) - 2);
}

Vec VectorSignal::operator()(double t) const {
  switch (kind_) {
    case Kind::kZero:
      return Vec::Zero(dim_);
    case Kind::kConstant:
      return constant_;
    case Kind::kClosedForm:
      return fn_(t);
    case Kind::kTable: {
      if (times_.size() == 1) return values_.row(0);
      if (t <= times_.front()) return values_.row(0);
      if (t >= times_.back()) return values_.row(values_.rows() - 1);
      int i = segment_of(t);
      double h = times_[i + 1] - times_[i];
      double w = (t - times_[i]) / h;
      return (1.0 - w) * values_.row(i).transpose() +
             w * values_.row(i + 1).transpose();
    }
    case Kind::kHermite: {
      if (t <= times_.front()) return values_.row(0);
      if (t >= times_.back()) return values_.row(values_.rows() - 1);
      int i = segment_of(t);
      double h = times_[i + 1] - times_[i];
      double s = (t - times_[i]) / h;
      double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
      double h10 = s * (1 - s) * (1 - s);
      double h01 = s * s * (3 - 2 * s);
      double h11 = s * s * (s - 1);
      return h00 * values_.row(i).transpose() +
             h10 * h * derivatives_.row(i).transpose() +
             h01 * values_.row(i + 1).transpose() +
             h11 * h * derivatives_.row(i + 1).transpose();
    }
  }
  return Vec::Zero(dim_);
}

}  // namespace ocdual
