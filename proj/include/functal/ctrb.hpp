#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "functal/matrix.hpp"
#include "functal/report.hpp"
#include "functal/signal.hpp"

namespace functal {

// Dynamics / input / target triple (A, B; F). Same target row-reduction
// policy as the observability triple.
struct CtrbTriple {
  Matrix A, B, F;
  std::vector<int> kept_rows;
  std::vector<std::string> warnings;

  static CtrbTriple make(Matrix A, Matrix B, Matrix F);
  int n() const { return A.rows(); }
};

// Image-space test: rank(F * ctrb matrix) == rank(F). Certificate on failure
// is a left combination q with q'FC = 0 but q'F != 0.
CtrbReport test_output_ctrb_kalman(const CtrbTriple& t);

// Per-eigenvalue route. Full-state-controllable systems are decided by the
// product pencil clause rank(F [lambda I - A, B]) == rank(F) over the
// spectrum. Otherwise the verdict combines that clause with trivial overlap
// between the target row space and the left kernel of the controllability
// matrix; the eigenspace-intersection witness is reported as the diagnostic
// explaining *where* the overlap meets an eigenspace.
CtrbReport test_output_ctrb_pbh(const CtrbTriple& t);

struct EigenspaceWitness {
  std::complex<double> lambda;
  Eigen::VectorXcd vector;
};

// First nonzero vector (by eigenvalue order: real part, then imaginary part)
// in ker(C') ∩ row(F) ∩ eigenspace of A' at a distinct eigenvalue, where C
// here is the controllability matrix of (A, B).
std::optional<EigenspaceWitness> eigenspace_intersection_witness(const CtrbTriple& t);

// Eigenvector of A' lying in the left kernel of the controllability matrix;
// exists for every pair (A, B) that is not full-state controllable.
std::optional<EigenspaceWitness> uncontrollable_eigenvector(const Matrix& A, const Matrix& B);

struct SteeringPlan {
  Signal u;                         // p-vector input trajectory on [0, t1]
  Eigen::VectorXd predicted_z_t1;   // target value implied by the Gramian algebra
  Eigen::MatrixXd W_F;              // F W_c(t1) F', symmetric PSD
  double condition_number = 0.0;
};

// Minimum-energy open-loop input steering z = Fx from x(0) = x0 to z_target
// at time t1, sampled on a uniform grid.
SteeringPlan min_energy_steering(const CtrbTriple& t, const Eigen::VectorXd& x0,
                                 const Eigen::VectorXd& z_target, double t1, int samples);

// State trajectory under sampled input: per-interval exact exponential
// stepping with trapezoidal input convolution. Oracle for the reconstruction
// and steering pipelines.
Signal simulate_lti(const Matrix& A, const Matrix& B, const Eigen::VectorXd& x0, const Signal& u,
                    double t1);

}  // namespace functal
