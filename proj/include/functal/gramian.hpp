#pragma once

#include <Eigen/Dense>

#include "functal/matrix.hpp"

namespace functal {

enum class GramianSide { Observability, Controllability };

// Finite-horizon Gramian on [0, t1]:
//   Observability:    integral of e^(A't) M' M e^(At) dt   (M plays the C role)
//   Controllability:  integral of e^(At) M M' e^(A't) dt   (M plays the B role)
// Evaluated in one shot from the exponential of the 2n x 2n augmented block
// matrix; always symmetrized. Float64 only; exact inputs must be lifted.
Eigen::MatrixXd finite_horizon_gramian(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M,
                                       double t1, GramianSide side);
Matrix finite_horizon_gramian(const Matrix& A, const Matrix& M, double t1, GramianSide side);

// Composite Gauss-Legendre evaluation of the same integral, used as the
// independent cross-check route.
Eigen::MatrixXd gramian_quadrature(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M, double t1,
                                   GramianSide side, int panels = 256);

}  // namespace functal
