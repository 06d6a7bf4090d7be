#pragma once

#include <Eigen/Dense>

namespace functal {

// Vector signal sampled on the uniform grid t_k = k * t1 / (samples - 1),
// k = 0..samples-1. Column k holds the sample at t_k.
struct Signal {
  double t1 = 0.0;
  Eigen::MatrixXd values;

  int dim() const { return static_cast<int>(values.rows()); }
  int samples() const { return static_cast<int>(values.cols()); }
  double dt() const;
  double time_at(int k) const;

  static Signal zero(int dim, int samples, double t1);
};

// Trapezoidal integral of the whole signal; returns a dim-vector.
Eigen::VectorXd trapezoid_integral(const Signal& s);

}  // namespace functal
