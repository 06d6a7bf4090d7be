#include "functal/signal.hpp"

#include <stdexcept>

namespace functal {

double Signal::dt() const {
  if (samples() < 2) throw std::invalid_argument("signal needs at least two samples");
  return t1 / (samples() - 1);
}

double Signal::time_at(int k) const { return k * dt(); }

Signal Signal::zero(int dim, int samples, double t1) {
  if (samples < 2) throw std::invalid_argument("signal needs at least two samples");
  if (t1 <= 0.0) throw std::invalid_argument("signal horizon must be positive");
  return Signal{t1, Eigen::MatrixXd::Zero(dim, samples)};
}

Eigen::VectorXd trapezoid_integral(const Signal& s) {
  const int n = s.samples();
  if (n < 2) throw std::invalid_argument("signal needs at least two samples");
  Eigen::VectorXd acc = 0.5 * (s.values.col(0) + s.values.col(n - 1));
  for (int k = 1; k < n - 1; ++k) acc += s.values.col(k);
  return acc * s.dt();
}

}  // namespace functal
