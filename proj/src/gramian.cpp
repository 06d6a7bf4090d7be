#include "functal/gramian.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "functal/linalg.hpp"

namespace functal {
namespace {

void check_inputs(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M, double t1,
                  GramianSide side) {
  if (A.rows() != A.cols()) throw std::invalid_argument("gramian: state matrix must be square");
  if (t1 <= 0.0) throw std::invalid_argument("gramian: horizon must be positive");
  const bool dims_ok = side == GramianSide::Observability ? M.cols() == A.rows()
                                                          : M.rows() == A.rows();
  if (!dims_ok) throw std::invalid_argument("gramian: factor dimension mismatch");
}

}  // namespace

Eigen::MatrixXd finite_horizon_gramian(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M,
                                       double t1, GramianSide side) {
  check_inputs(A, M, t1, side);
  const int n = static_cast<int>(A.rows());
  // S is the semigroup generator appearing on the right of the integrand.
  const Eigen::MatrixXd S = side == GramianSide::Observability ? A : A.transpose();
  const Eigen::MatrixXd G = side == GramianSide::Observability
                                ? Eigen::MatrixXd(M.transpose() * M)
                                : Eigen::MatrixXd(M * M.transpose());
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = -S.transpose();
  block.topRightCorner(n, n) = G;
  block.bottomRightCorner(n, n) = S;
  const Eigen::MatrixXd E = matrix_exponential(block, t1);
  Eigen::MatrixXd W = E.bottomRightCorner(n, n).transpose() * E.topRightCorner(n, n);
  return 0.5 * (W + W.transpose());
}

Matrix finite_horizon_gramian(const Matrix& A, const Matrix& M, double t1, GramianSide side) {
  if (A.is_exact() || M.is_exact())
    throw std::invalid_argument("gramian requires Float64 matrices; lift() first");
  return Matrix::from_dense(finite_horizon_gramian(A.dense(), M.dense(), t1, side), A.field());
}

Eigen::MatrixXd gramian_quadrature(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M, double t1,
                                   GramianSide side, int panels) {
  check_inputs(A, M, t1, side);
  if (panels < 1) throw std::invalid_argument("gramian: panel count must be positive");
  const int n = static_cast<int>(A.rows());
  const Eigen::MatrixXd S = side == GramianSide::Observability ? A : A.transpose();
  const Eigen::MatrixXd G = side == GramianSide::Observability
                                ? Eigen::MatrixXd(M.transpose() * M)
                                : Eigen::MatrixXd(M * M.transpose());

  // 5-point Gauss-Legendre on [0, 1].
  static const std::array<double, 5> xi = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                           0.5384693101056831, 0.9061798459386640};
  static const std::array<double, 5> wi = {0.2369268850561891, 0.4786286704993665,
                                           0.5688888888888889, 0.4786286704993665,
                                           0.2369268850561891};

  const double h = t1 / panels;
  std::array<Eigen::MatrixXd, 5> node_factor;
  for (int i = 0; i < 5; ++i) node_factor[i] = matrix_exponential(S, 0.5 * (xi[i] + 1.0) * h);
  const Eigen::MatrixXd step = matrix_exponential(S, h);

  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd panel_base = Eigen::MatrixXd::Identity(n, n);
  for (int p = 0; p < panels; ++p) {
    for (int i = 0; i < 5; ++i) {
      const Eigen::MatrixXd phi = panel_base * node_factor[i];
      W += (0.5 * h * wi[i]) * (phi.transpose() * G * phi);
    }
    panel_base = panel_base * step;
  }
  return 0.5 * (W + W.transpose());
}

}  // namespace functal
