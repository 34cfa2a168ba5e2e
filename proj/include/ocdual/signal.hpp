#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "ocdual/common.hpp"

namespace ocdual {

// Time-dependent vector data (forcing, base-state components).  Supports the
// problem-file encodings (zero, constant, sampled table with linear
// interpolation) plus closed-form callables and Hermite-interpolated tables
// for oracle-produced trajectories with known derivatives.
class VectorSignal {
 public:
  VectorSignal() = default;

  static VectorSignal zero(int dim);
  static VectorSignal constant(Vec value);
  // Rows (t_i, v_i) with strictly increasing t_i; linear interpolation,
  // clamped outside the sampled range.
  static VectorSignal table(std::vector<double> times, Mat values);
  // Cubic Hermite interpolation from samples and their time derivatives.
  static VectorSignal hermite_table(std::vector<double> times, Mat values,
                                    Mat derivatives);
  static VectorSignal closed_form(int dim, std::function<Vec(double)> fn);

  int dim() const { return dim_; }
  bool is_zero() const { return kind_ == Kind::kZero; }
  bool is_constant() const { return kind_ == Kind::kConstant; }
  bool is_table() const { return kind_ == Kind::kTable; }
  const std::vector<double>& table_times() const { return times_; }
  const Mat& table_values() const { return values_; }
  Vec operator()(double t) const;

 private:
  enum class Kind { kZero, kConstant, kTable, kHermite, kClosedForm };
  Kind kind_ = Kind::kZero;
  int dim_ = 0;
  Vec constant_;
  std::vector<double> times_;
  Mat values_;       // one row per sample
  Mat derivatives_;  // Hermite only
  std::function<Vec(double)> fn_;

  int segment_of(double t) const;
};

// Guiding trajectories (x̄, ū, p̄); defaults to zero.
struct BaseState {
  VectorSignal x;
  VectorSignal u;
  VectorSignal p;

  static BaseState zero(int n, int m) {
    return BaseState{VectorSignal::zero(n), VectorSignal::zero(m),
                     VectorSignal::zero(n)};
  }
  bool is_zero() const { return x.is_zero() && u.is_zero() && p.is_zero(); }
};

}  // namespace ocdual
