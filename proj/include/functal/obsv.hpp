#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "functal/jordan.hpp"
#include "functal/matrix.hpp"
#include "functal/report.hpp"
#include "functal/signal.hpp"

namespace functal {

// Measurement / dynamics / target triple (C, A; F). Construction checks
// conformability and reduces a rank-deficient target matrix to a maximal
// independent row subset (dependent target rows are recoverable from the
// kept ones), recording the reduction as a warning.
struct ObsvTriple {
  Matrix C, A, F;
  std::vector<int> kept_rows;  // indices of the original target rows kept
  std::vector<std::string> warnings;

  static ObsvTriple make(Matrix C, Matrix A, Matrix F);
  int n() const { return A.rows(); }
};

// Image-space test: rank [O; F] == rank O with O the observability matrix.
ObsvReport test_functional_obsv_kalman(const ObsvTriple& t);

// Stacked-target test: rank [O(C,A); O(F,A)] == rank O(C,A). Agrees with the
// image-space test on every input.
ObsvReport test_functional_obsv_stacked(const ObsvTriple& t);

// Per-eigenvalue pencil test: rank [lambda I - A; C; F] == rank [lambda I - A; C]
// at every point of the clustered spectrum (off-spectrum points hold
// trivially). Sufficiency requires independent lead columns of F in Jordan
// row coordinates; assumption_ok records that gate, and a warning marks the
// verdict necessary-only when it fails.
ObsvReport test_functional_obsv_pbh(const ObsvTriple& t);
ObsvReport test_functional_obsv_pbh(const ObsvTriple& t, const JordanForm& jf);

// The pencil test restricted to eigenvalues with nonnegative real part
// (within clustering margin); same assumption gate.
ObsvReport test_functional_detectability(const ObsvTriple& t);
ObsvReport test_functional_detectability(const ObsvTriple& t, const JordanForm& jf);

// Orthogonal change of coordinates splitting observable from unobservable
// states: rows 0..n_o-1 of Q span the observability row space. The kernel of
// the observability matrix is the invariant subspace, so the transformed
// dynamics are block lower-triangular (zero block at top-right: unobservable
// coordinates never feed the observable ones, hence never reach the output).
// A_12 is the coupling block driving the unobservable coordinates from the
// observable ones. The target's unobservable part F_u vanishes exactly when
// the image-space test passes.
struct CanonicalObsvDecomposition {
  Matrix Q;  // n x n orthogonal
  Matrix A_o, A_12, A_u, C_o, F_o, F_u;
  int n_o = 0;
};
CanonicalObsvDecomposition canonical_obsv_decomposition(const Matrix& C, const Matrix& A,
                                                        const Matrix& F);

struct ReconstructionResult {
  Eigen::VectorXd z0;       // reconstructed target value at t = 0
  Eigen::MatrixXd G;        // solves G W_o = F on the Gramian image
  double gramian_residual;  // ||G W_o - F||_F
  std::vector<std::string> warnings;
};

// Reconstructs z(0) = F x(0) from sampled input/output signals on [0, t1]
// through the finite-horizon observability Gramian; trapezoidal quadrature
// on the caller's grid (at least 16 samples).
ReconstructionResult reconstruct_target(const ObsvTriple& t, const Matrix& B, const Signal& u,
                                        const Signal& y, double t1);

}  // namespace functal
