#include <Eigen/Dense>
#include <random>

#include "doctest.h"
#include "functal/gramian.hpp"
#include "functal/linalg.hpp"
#include "functal/matrix.hpp"

using namespace functal;

namespace {

Eigen::MatrixXd chain_matrix() {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
  A(0, 1) = 1.0;
  A(1, 2) = 1.0;
  return A;
}

Eigen::MatrixXd random_matrix(int n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = scale * normal(rng);
  return M;
}

}  // namespace

TEST_CASE("chain observability Gramian has the closed form t1 * e3 e3'") {
  const Eigen::MatrixXd A = chain_matrix();
  Eigen::MatrixXd C(1, 3);
  C << 0, 0, 1;
  for (double t1 : {0.5, 1.0, 2.0}) {
    const Eigen::MatrixXd W = finite_horizon_gramian(A, C, t1, GramianSide::Observability);
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 3);
    expected(2, 2) = t1;
    CHECK((W - expected).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + t1));
  }
}

TEST_CASE("chain controllability Gramian matches the polynomial moment integrals") {
  // e^{At} B = (t^2/2, t, 1)', so W entries are monomial integrals on [0,1].
  const Eigen::MatrixXd A = chain_matrix();
  Eigen::MatrixXd B(3, 1);
  B << 0, 0, 1;
  const Eigen::MatrixXd W = finite_horizon_gramian(A, B, 1.0, GramianSide::Controllability);
  Eigen::MatrixXd expected(3, 3);
  expected << 1.0 / 20, 1.0 / 8, 1.0 / 6, 1.0 / 8, 1.0 / 3, 1.0 / 2, 1.0 / 6, 1.0 / 2, 1.0;
  CHECK((W - expected).cwiseAbs().maxCoeff() <= 1e-12);

  Eigen::RowVectorXd F(3);
  F << 1, 0, 0;
  CHECK(std::abs((F * W * F.transpose())(0, 0) - 1.0 / 20) <= 1e-13);
}

TEST_CASE("controllability Gramian of (A, B) equals observability Gramian of (B', A')") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const Eigen::MatrixXd A = random_matrix(n, rng, 0.6);
    const Eigen::MatrixXd B = random_matrix(n, rng, 1.0).leftCols(2);
    const Eigen::MatrixXd Wc = finite_horizon_gramian(A, B, 1.0, GramianSide::Controllability);
    const Eigen::MatrixXd Wo = finite_horizon_gramian(A.transpose(), B.transpose(), 1.0,
                                                      GramianSide::Observability);
    CHECK((Wc - Wo).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + Wc.cwiseAbs().maxCoeff()));
    // Symmetric by construction.
    CHECK((Wc - Wc.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("augmented-exponential route agrees with Gauss-Legendre quadrature") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const Eigen::MatrixXd A = random_matrix(n, rng, 0.7);
    const Eigen::MatrixXd C = random_matrix(n, rng, 1.0).topRows(2);
    for (double t1 : {0.5, 1.5}) {
      const Eigen::MatrixXd W = finite_horizon_gramian(A, C, t1, GramianSide::Observability);
      const Eigen::MatrixXd Q = gramian_quadrature(A, C, t1, GramianSide::Observability);
      const double rel = (W - Q).norm() / (1.0 + W.norm());
      CHECK(rel <= 1e-8);
    }
  }
}

TEST_CASE("Gramian image equals the image of the transposed observability matrix") {
  // Unobservable directions are exactly the Gramian kernel on any horizon.
  const Matrix A = Matrix::from_rows({{-1, 0, 0}, {0, 2, 0}, {0, 0, 0.5}});
  const Matrix C = Matrix::from_rows({{1, 1, 0}});
  const Eigen::MatrixXd W =
      finite_horizon_gramian(A.dense(), C.dense(), 1.0, GramianSide::Observability);
  const Matrix O = obsv_matrix(C, A);
  const int rank_O = numerical_rank(O);
  CHECK(numerical_rank(Matrix::from_dense(W)) == rank_O);
  const Eigen::MatrixXd joint(
      (Eigen::MatrixXd(3, 3 + O.rows()) << W, O.transpose().dense()).finished());
  CHECK(numerical_rank(Matrix::from_dense(joint)) == rank_O);
}

TEST_CASE("Matrix overload lifts exact input and warns through the wrapper") {
  const Matrix A = Matrix::exact_from_rows({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}});
  const Matrix C = Matrix::exact_from_rows({{0, 0, 1}});
  const Matrix W = finite_horizon_gramian(A.lift(), C.lift(), 2.0, GramianSide::Observability);
  CHECK(W.rows() == 3);
  CHECK(std::abs(W.f(2, 2) - 2.0) <= 1e-12);
}
